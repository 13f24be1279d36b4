//! Pattern-based memoization: a subdag `P` applied in both halves of an
//! application, `(P a)(P b)`, is folded into `Sp P a b`.

use super::{CoddExpr, DagBuilder, Node, NodeId};

/// A subdag used as the function of at least two distinct applications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repeat {
    pub pattern: CoddExpr,
    /// Id of the pattern root in the searched expression.
    pub node: NodeId,
    /// Ids of the `Apply` nodes using it as their function.
    pub sites: Vec<NodeId>,
}

/// All repeated function subdags, largest first (ties by node id).
pub fn find_repeats(e: &CoddExpr) -> Vec<Repeat> {
    let mut sites: Vec<Vec<NodeId>> = vec![Vec::new(); e.len()];
    for (id, node) in e.nodes().iter().enumerate() {
        if let Node::Apply { func, .. } = node {
            sites[*func as usize].push(id as NodeId);
        }
    }
    let mut repeats: Vec<Repeat> = sites
        .into_iter()
        .enumerate()
        .filter(|(_, s)| s.len() >= 2)
        .map(|(id, sites)| Repeat { pattern: e.subexpr(id as NodeId), node: id as NodeId, sites })
        .collect();
    repeats.sort_by(|a, b| b.pattern.len().cmp(&a.pattern.len()).then(a.node.cmp(&b.node)));
    repeats
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoOutcome {
    pub expr: CoddExpr,
    /// Number of `(P a)(P b)` sites folded.
    pub rewritten: usize,
    /// Set when nothing was rewritten, saying why.
    pub notice: Option<String>,
}

/// Rewrites every `(P a)(P b)` in `e` to `Sp P a b`, including `a == b`,
/// where hash-consing shares the two halves. Without a site, `e` is returned
/// unchanged with a notice.
pub fn memoize_rewrite(e: &CoddExpr, pattern: &CoddExpr) -> MemoOutcome {
    let unchanged = |why: String| MemoOutcome { expr: e.clone(), rewritten: 0, notice: Some(why) };
    let Some(pid) = e.find(pattern) else {
        return unchanged("pattern does not occur in the expression".into());
    };
    let applied_arg = |id: NodeId| match e.node(id) {
        Node::Apply { func, arg } if *func == pid => Some(*arg),
        _ => None,
    };
    let mut b = DagBuilder::new();
    let mut map: Vec<NodeId> = Vec::with_capacity(e.len());
    let mut rewritten = 0;
    for node in e.nodes() {
        let new = match node {
            Node::Apply { func, arg } => match (applied_arg(*func), applied_arg(*arg)) {
                (Some(a), Some(c)) => {
                    rewritten += 1;
                    let sp = b.node(Node::Sp);
                    let head = b.apply(sp, map[pid as usize]);
                    let head = b.apply(head, map[a as usize]);
                    b.apply(head, map[c as usize])
                }
                _ => b.apply(map[*func as usize], map[*arg as usize]),
            },
            Node::Decide { bit, zero, one } => b.decide(*bit, map[*zero as usize], map[*one as usize]),
            other => b.node(other.clone()),
        };
        map.push(new);
    }
    if rewritten == 0 {
        return unchanged("pattern never occurs in both halves of one application".into());
    }
    MemoOutcome { expr: b.finish(map[e.root_id() as usize]), rewritten, notice: None }
}
