//! Monotone Boolean circuits: netlist parsing, printing, evaluation and generation.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Input {
        name: String,
        value: bool,
    },
    Gate {
        name: String,
        kind: GateKind,
        left: usize,
        right: usize,
    },
}

impl Node {
    pub fn name(&self) -> &str {
        match self {
            Node::Input { name, .. } | Node::Gate { name, .. } => name,
        }
    }

    /// Distinct source nodes of a gate.
    pub fn sources(&self) -> Vec<usize> {
        match *self {
            Node::Input { .. } => vec![],
            Node::Gate { left, right, .. } if left == right => vec![left],
            Node::Gate { left, right, .. } => vec![left, right],
        }
    }
}

/// Nodes in topological order; gate sources always point to earlier nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneCircuit {
    nodes: Vec<Node>,
    output: usize,
}

impl MonotoneCircuit {
    /// Panics unless every source refers to an earlier node.
    pub fn new(nodes: Vec<Node>, output: usize) -> MonotoneCircuit {
        for (k, node) in nodes.iter().enumerate() {
            if let Node::Gate { left, right, .. } = node {
                assert!(*left < k && *right < k, "gate {k} is not in topological order");
            }
        }
        assert!(output < nodes.len(), "output refers to a missing node");
        MonotoneCircuit { nodes, output }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn inputs(&self) -> impl Iterator<Item = (&str, bool)> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Input { name, value } => Some((name.as_str(), *value)),
            _ => None,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs().count()
    }

    pub fn num_gates(&self) -> usize {
        self.nodes.len() - self.num_inputs()
    }

    /// Same circuit with the input values replaced, in input order.
    pub fn with_inputs(&self, values: &[bool]) -> MonotoneCircuit {
        let mut it = values.iter();
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Input { name, .. } => Node::Input {
                    name: name.clone(),
                    value: *it.next().expect("too few input values"),
                },
                g => g.clone(),
            })
            .collect();
        MonotoneCircuit {
            nodes,
            output: self.output,
        }
    }

    /// Value of every node.
    pub fn node_values(&self) -> Vec<bool> {
        let mut val = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Input { value, .. } => value,
                Node::Gate {
                    kind: GateKind::And,
                    left,
                    right,
                    ..
                } => val[left] && val[right],
                Node::Gate {
                    kind: GateKind::Or,
                    left,
                    right,
                    ..
                } => val[left] || val[right],
            };
            val.push(v);
        }
        val
    }

    /// Number of distinct consumers of each node; the output counts as one.
    pub fn consumer_counts(&self) -> Vec<usize> {
        let mut count = vec![0; self.nodes.len()];
        for node in &self.nodes {
            for s in node.sources() {
                count[s] += 1;
            }
        }
        count[self.output] += 1;
        count
    }

    /// Restriction to the nodes the output depends on, order preserved.
    pub fn output_cone(&self) -> MonotoneCircuit {
        let mut keep = vec![false; self.nodes.len()];
        keep[self.output] = true;
        for k in (0..self.nodes.len()).rev() {
            if keep[k] {
                for s in self.nodes[k].sources() {
                    keep[s] = true;
                }
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (k, node) in self.nodes.iter().enumerate() {
            if !keep[k] {
                continue;
            }
            remap[k] = nodes.len();
            nodes.push(match node {
                Node::Gate {
                    name,
                    kind,
                    left,
                    right,
                } => Node::Gate {
                    name: name.clone(),
                    kind: *kind,
                    left: remap[*left],
                    right: remap[*right],
                },
                n => n.clone(),
            });
        }
        MonotoneCircuit::new(nodes, remap[self.output])
    }
}

pub fn evaluate_circuit(c: &MonotoneCircuit) -> bool {
    c.node_values()[c.output]
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

pub fn parse_circuit(text: &str) -> Result<MonotoneCircuit> {
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut output: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        if output.is_some() {
            return Err(parse_err(line_no, "statement after output"));
        }
        let lookup = |name: &str| -> Result<usize> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| parse_err(line_no, format!("unknown or forward reference {name:?}")))
        };
        let fresh = |name: &str| -> Result<String> {
            if !valid_name(name) {
                return Err(parse_err(line_no, format!("invalid name {name:?}")));
            }
            if index.contains_key(name) {
                return Err(parse_err(line_no, format!("duplicate name {name:?}")));
            }
            Ok(name.to_string())
        };
        match words.as_slice() {
            ["input", name, v] => {
                let value = match *v {
                    "0" => false,
                    "1" => true,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("input value must be 0 or 1, got {v:?}"),
                        ))
                    }
                };
                let name = fresh(name)?;
                index.insert(name.clone(), nodes.len());
                nodes.push(Node::Input { name, value });
            }
            [op @ ("and" | "or"), name, a, b] => {
                let kind = if *op == "and" { GateKind::And } else { GateKind::Or };
                let name = fresh(name)?;
                let (left, right) = (lookup(a)?, lookup(b)?);
                index.insert(name.clone(), nodes.len());
                nodes.push(Node::Gate {
                    name,
                    kind,
                    left,
                    right,
                });
            }
            ["output", src] => output = Some(lookup(src)?),
            [kw, ..] => {
                let known = ["input", "and", "or", "output"].contains(kw);
                let reason = if known {
                    format!("wrong number of fields for {kw:?}")
                } else {
                    format!("unknown statement {kw:?}")
                };
                return Err(parse_err(line_no, reason));
            }
            [] => unreachable!(),
        }
    }
    let last = text.lines().count().max(1);
    let output = output.ok_or_else(|| parse_err(last, "missing output statement"))?;
    Ok(MonotoneCircuit::new(nodes, output))
}

pub fn print_circuit(c: &MonotoneCircuit) -> String {
    let mut s = String::new();
    for node in &c.nodes {
        match node {
            Node::Input { name, value } => {
                writeln!(s, "input {name} {}", *value as u8).unwrap();
            }
            Node::Gate {
                name,
                kind,
                left,
                right,
            } => {
                let op = match kind {
                    GateKind::And => "and",
                    GateKind::Or => "or",
                };
                writeln!(
                    s,
                    "{op} {name} {} {}",
                    c.nodes[*left].name(),
                    c.nodes[*right].name()
                )
                .unwrap();
            }
        }
    }
    writeln!(s, "output {}", c.nodes[c.output].name()).unwrap();
    s
}

/// Inserts `OR(x, x)` duplicators so that no node has more than two consumers.
pub fn normalize_fanout(c: &MonotoneCircuit) -> MonotoneCircuit {
    let counts = c.consumer_counts();
    if counts.iter().all(|&k| k <= 2) {
        return c.clone();
    }
    let mut taken: std::collections::HashSet<String> = c.nodes.iter().map(|n| n.name().to_string()).collect();
    let mut fresh = |base: &str| {
        let mut k = 0;
        loop {
            let name = format!("{base}_dup{k}");
            if taken.insert(name.clone()) {
                return name;
            }
            k += 1;
        }
    };

    // feeders[v]: the node each successive consumer of v reads from
    let mut nodes: Vec<Node> = Vec::new();
    let mut new_id = vec![0usize; c.nodes.len()];
    let mut feeders: Vec<Vec<usize>> = vec![Vec::new(); c.nodes.len()];
    let mut served = vec![0usize; c.nodes.len()];
    let mut take = |v: usize, feeders: &mut Vec<Vec<usize>>| {
        let f = feeders[v][served[v]];
        served[v] += 1;
        f
    };
    for (k, node) in c.nodes.iter().enumerate() {
        let node = match node {
            Node::Gate {
                name,
                kind,
                left,
                right,
            } => {
                let l = take(*left, &mut feeders);
                let r = if left == right {
                    l
                } else {
                    take(*right, &mut feeders)
                };
                Node::Gate {
                    name: name.clone(),
                    kind: *kind,
                    left: l,
                    right: r,
                }
            }
            n => n.clone(),
        };
        new_id[k] = nodes.len();
        nodes.push(node);
        // chain x -> d1 -> d2 ...; each link serves one consumer and feeds the next
        let need = counts[k];
        let mut list = Vec::with_capacity(need);
        let mut cur = new_id[k];
        let mut left = need;
        while left > 2 {
            list.push(cur);
            let d = nodes.len();
            nodes.push(Node::Gate {
                name: fresh(c.nodes[k].name()),
                kind: GateKind::Or,
                left: cur,
                right: cur,
            });
            cur = d;
            left -= 1;
        }
        for _ in 0..left {
            list.push(cur);
        }
        feeders[k] = list;
    }
    let out = take(c.output, &mut feeders);
    MonotoneCircuit::new(nodes, out)
}

/// Deterministic random circuit: inputs `x0..`, gates `g0..`, output the last gate.
pub fn random_circuit(num_inputs: usize, num_gates: usize, seed: u64) -> MonotoneCircuit {
    assert!(
        num_inputs >= 1 && num_gates >= 1,
        "need at least one input and one gate"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(num_inputs + num_gates);
    for k in 0..num_inputs {
        nodes.push(Node::Input {
            name: format!("x{k}"),
            value: rng.gen_bool(0.5),
        });
    }
    for k in 0..num_gates {
        let kind = if rng.gen_bool(0.5) {
            GateKind::And
        } else {
            GateKind::Or
        };
        let avail = nodes.len();
        let left = rng.gen_range(0..avail);
        let right = rng.gen_range(0..avail);
        nodes.push(Node::Gate {
            name: format!("g{k}"),
            kind,
            left,
            right,
        });
    }
    let out = nodes.len() - 1;
    MonotoneCircuit::new(nodes, out)
}
