//! Normal-order reduction with a step budget.
//!
//! Rules, one step each:
//!
//! * `K y x → y`
//! * `S f g x → (f x)(g x)`
//! * `Sp f x y → (f x)(f y)`
//! * `Encode v → Leaf(encode(nf v))`
//! * `Decode v → decode(bits)` once `v` normalizes to a leaf
//! * `Decide(b, z, o) v → z` or `o` by bit `b` of the leaf `v` (bits past
//!   the end read 0); a selected `Decide` child is applied to `v` in turn,
//!   so first-order dags evaluate like decision trees
//!
//! Anything else with a non-leaf argument or too few arguments is stuck and
//! is returned with its arguments normalized.

use std::collections::HashMap;
use std::rc::Rc;

use super::{decode, encode, CoddExpr, DagBuilder, Node, NodeId};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// Reduction step budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel(u64);

impl Fuel {
    pub fn new(steps: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("fuel", "must be positive"));
        }
        Ok(Fuel(steps))
    }

    pub fn steps(&self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Normal(CoddExpr),
    FuelExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub outcome: Outcome,
    pub steps: u64,
}

impl Evaluation {
    pub fn normal_form(&self) -> Option<&CoddExpr> {
        match &self.outcome {
            Outcome::Normal(e) => Some(e),
            Outcome::FuelExhausted => None,
        }
    }
}

/// Applies `e` to `args` (curried, left to right) and reduces to normal form.
///
/// Running out of fuel is an [`Outcome`], not an error; decoding malformed
/// bits is an error.
pub fn eval_codd(e: &CoddExpr, args: &[CoddExpr], fuel: Fuel) -> Result<Evaluation> {
    let mut term = Term::from_expr(e);
    for a in args {
        term = Term::app(term, Term::from_expr(a));
    }
    let mut m = Machine { budget: fuel.0, steps: 0, normalized: HashMap::new() };
    match m.normalize(term) {
        Ok(t) => Ok(Evaluation { outcome: Outcome::Normal(t.to_expr()), steps: m.steps }),
        Err(Stop::Exhausted) => Ok(Evaluation { outcome: Outcome::FuelExhausted, steps: m.steps }),
        Err(Stop::Failed(err)) => Err(err),
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Term {
    Leaf(BitString),
    Decide(u16, Rc<Term>, Rc<Term>),
    K,
    S,
    Sp,
    Encode,
    Decode,
    App(Rc<Term>, Rc<Term>),
}

impl Term {
    fn app(f: Rc<Term>, a: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::App(f, a))
    }

    fn from_expr(e: &CoddExpr) -> Rc<Term> {
        let mut built: Vec<Rc<Term>> = Vec::with_capacity(e.len());
        for node in e.nodes() {
            let get = |id: NodeId| built[id as usize].clone();
            let t = match node {
                Node::Leaf(b) => Term::Leaf(b.clone()),
                Node::Decide { bit, zero, one } => Term::Decide(*bit, get(*zero), get(*one)),
                Node::K => Term::K,
                Node::S => Term::S,
                Node::Sp => Term::Sp,
                Node::Encode => Term::Encode,
                Node::Decode => Term::Decode,
                Node::Apply { func, arg } => Term::App(get(*func), get(*arg)),
            };
            built.push(Rc::new(t));
        }
        built.pop().expect("nonempty")
    }

    fn to_expr(self: &Rc<Term>) -> CoddExpr {
        let mut b = DagBuilder::new();
        let mut memo: HashMap<*const Term, NodeId> = HashMap::new();
        // explicit stack: results can be deep
        let mut stack: Vec<(Rc<Term>, bool)> = vec![(self.clone(), false)];
        while let Some((t, ready)) = stack.pop() {
            let key = Rc::as_ptr(&t);
            if memo.contains_key(&key) {
                continue;
            }
            let kids: Vec<&Rc<Term>> = match &*t {
                Term::Decide(_, z, o) => vec![z, o],
                Term::App(f, a) => vec![f, a],
                _ => vec![],
            };
            if !ready {
                stack.push((t.clone(), true));
                for k in kids.into_iter().rev() {
                    stack.push((k.clone(), false));
                }
                continue;
            }
            let id_of = |k: &Rc<Term>| memo[&Rc::as_ptr(k)];
            let node = match &*t {
                Term::Leaf(bits) => Node::Leaf(bits.clone()),
                Term::Decide(bit, z, o) => Node::Decide { bit: *bit, zero: id_of(z), one: id_of(o) },
                Term::K => Node::K,
                Term::S => Node::S,
                Term::Sp => Node::Sp,
                Term::Encode => Node::Encode,
                Term::Decode => Node::Decode,
                Term::App(f, a) => Node::Apply { func: id_of(f), arg: id_of(a) },
            };
            let id = b.node(node);
            memo.insert(key, id);
        }
        let root = memo[&Rc::as_ptr(self)];
        b.finish(root)
    }
}

enum Stop {
    Exhausted,
    Failed(Error),
}

struct Machine {
    budget: u64,
    steps: u64,
    /// Shared subterms are normalized once.
    normalized: HashMap<*const Term, (Rc<Term>, Rc<Term>)>,
}

impl Machine {
    fn tick(&mut self) -> Result<(), Stop> {
        if self.steps == self.budget {
            return Err(Stop::Exhausted);
        }
        self.steps += 1;
        Ok(())
    }

    /// Weak head normal form: the head is stuck or lacks arguments.
    fn whnf(&mut self, mut t: Rc<Term>) -> Result<Rc<Term>, Stop> {
        loop {
            // unwind the spine; args[last] is the first argument
            let mut head = t.clone();
            let mut args: Vec<Rc<Term>> = Vec::new();
            while let Term::App(f, a) = &*head {
                args.push(a.clone());
                head = f.clone();
            }
            let next = match (&*head, args.len()) {
                (Term::K, n) if n >= 2 => {
                    self.tick()?;
                    let y = args.pop().expect("arity");
                    args.pop();
                    y
                }
                (Term::S, n) if n >= 3 => {
                    self.tick()?;
                    let (f, g, x) = (args.pop().unwrap(), args.pop().unwrap(), args.pop().unwrap());
                    Term::app(Term::app(f, x.clone()), Term::app(g, x))
                }
                (Term::Sp, n) if n >= 3 => {
                    self.tick()?;
                    let (f, x, y) = (args.pop().unwrap(), args.pop().unwrap(), args.pop().unwrap());
                    Term::app(Term::app(f.clone(), x), Term::app(f, y))
                }
                (Term::Encode, n) if n >= 1 => {
                    let v = self.normalize(args.pop().unwrap())?;
                    self.tick()?;
                    let bits = encode(&v.to_expr()).map_err(Stop::Failed)?;
                    Rc::new(Term::Leaf(bits.0))
                }
                (Term::Decode, n) if n >= 1 => {
                    let v = self.normalize(args.pop().unwrap())?;
                    let Term::Leaf(bits) = &*v else {
                        args.push(v);
                        return Ok(rebuild(head, args));
                    };
                    self.tick()?;
                    Term::from_expr(&decode(bits).map_err(Stop::Failed)?)
                }
                (Term::Decide(bit, zero, one), n) if n >= 1 => {
                    let v = self.whnf(args.pop().unwrap())?;
                    let Term::Leaf(bits) = &*v else {
                        args.push(v);
                        return Ok(rebuild(head, args));
                    };
                    self.tick()?;
                    let chosen = if bits.get(*bit as usize) { one } else { zero };
                    match &**chosen {
                        Term::Decide(..) => Term::app(chosen.clone(), v.clone()),
                        _ => chosen.clone(),
                    }
                }
                _ => return Ok(t),
            };
            t = rebuild(next, args);
        }
    }

    fn normalize(&mut self, t: Rc<Term>) -> Result<Rc<Term>, Stop> {
        if let Some((_, done)) = self.normalized.get(&Rc::as_ptr(&t)) {
            return Ok(done.clone());
        }
        let w = self.whnf(t.clone())?;
        let mut head = w.clone();
        let mut args: Vec<Rc<Term>> = Vec::new();
        while let Term::App(f, a) = &*head {
            args.push(a.clone());
            head = f.clone();
        }
        let head = match &*head {
            Term::Decide(bit, z, o) => {
                Rc::new(Term::Decide(*bit, self.normalize(z.clone())?, self.normalize(o.clone())?))
            }
            _ => head,
        };
        let args = args.into_iter().map(|a| self.normalize(a)).collect::<Result<Vec<_>, Stop>>()?;
        let done = rebuild(head, args);
        // the key term is kept alive so its address cannot be reused
        self.normalized.insert(Rc::as_ptr(&t), (t, done.clone()));
        Ok(done)
    }
}

/// `head a1 a2 ...` where `args` lists the arguments last-first.
fn rebuild(head: Rc<Term>, args: Vec<Rc<Term>>) -> Rc<Term> {
    args.into_iter().rev().fold(head, Term::app)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(s: &str) -> CoddExpr {
        CoddExpr::leaf(s.parse().unwrap())
    }

    fn fuel() -> Fuel {
        Fuel::new(10_000).unwrap()
    }

    fn nf(e: &CoddExpr, args: &[CoddExpr]) -> CoddExpr {
        eval_codd(e, args, fuel()).unwrap().normal_form().cloned().expect("normalizes")
    }

    #[test]
    fn k_discards_its_second_argument() {
        assert_eq!(nf(&CoddExpr::k(), &[leaf("1"), leaf("0")]), leaf("1"));
        // one argument: stuck partial application
        assert_eq!(nf(&CoddExpr::k(), &[leaf("1")]), CoddExpr::apply(&CoddExpr::k(), &leaf("1")));
    }

    #[test]
    fn skk_is_identity() {
        let skk = CoddExpr::apply_all(&CoddExpr::s(), &[&CoddExpr::k(), &CoddExpr::k()]);
        let v = CoddExpr::decide(2, &leaf("01"), &leaf("10"));
        let r = eval_codd(&skk, std::slice::from_ref(&v), fuel()).unwrap();
        assert_eq!(r.normal_form(), Some(&v));
        assert_eq!(r.steps, 2);
    }

    #[test]
    fn sp_duplicates_its_function() {
        let p = CoddExpr::k();
        let e = CoddExpr::apply_all(&CoddExpr::sp(), &[&p, &leaf("0"), &leaf("1")]);
        let expected = CoddExpr::apply(&CoddExpr::apply(&p, &leaf("0")), &CoddExpr::apply(&p, &leaf("1")));
        // (K 0)(K 1) reduces further to 0
        let r = eval_codd(&e, &[], fuel()).unwrap();
        assert_eq!(r.normal_form(), Some(&leaf("0")));
        assert_eq!(r.steps, 2);
        let one = eval_codd(&e, &[], Fuel::new(1).unwrap()).unwrap();
        assert_eq!(one.outcome, Outcome::FuelExhausted);
        let direct = eval_codd(&expected, &[], fuel()).unwrap();
        assert_eq!(direct.normal_form(), r.normal_form());
        assert_eq!(direct.steps + 1, r.steps);
    }

    #[test]
    fn standard_s_shares_its_argument() {
        // S K S x = K x (S x) = x
        let e = CoddExpr::apply_all(&CoddExpr::s(), &[&CoddExpr::k(), &CoddExpr::s()]);
        assert_eq!(nf(&e, &[leaf("110")]), leaf("110"));
    }

    #[test]
    fn decide_selects_by_bit() {
        let d = CoddExpr::decide(0, &leaf("00"), &leaf("11"));
        assert_eq!(nf(&d, &[leaf("10")]), leaf("11"));
        assert_eq!(nf(&d, &[leaf("01")]), leaf("00"));
        // out of range reads 0
        let far = CoddExpr::decide(9, &leaf("00"), &leaf("11"));
        assert_eq!(nf(&far, &[leaf("11")]), leaf("00"));
    }

    #[test]
    fn nested_decide_behaves_like_a_tree() {
        let inner = CoddExpr::decide(1, &leaf("10"), &leaf("11"));
        let d = CoddExpr::decide(0, &leaf("00"), &inner);
        assert_eq!(nf(&d, &[leaf("10")]), leaf("10"));
        assert_eq!(nf(&d, &[leaf("11")]), leaf("11"));
        assert_eq!(nf(&d, &[leaf("01")]), leaf("00"));
    }

    #[test]
    fn decide_on_a_non_leaf_is_stuck() {
        let d = CoddExpr::decide(0, &leaf("0"), &leaf("1"));
        let r = nf(&d, &[CoddExpr::k()]);
        assert_eq!(r, CoddExpr::apply(&d, &CoddExpr::k()));
    }

    #[test]
    fn encode_then_decode() {
        let v = CoddExpr::decide(1, &leaf("0"), &CoddExpr::k());
        let enc = nf(&CoddExpr::encoder(), std::slice::from_ref(&v));
        assert_eq!(enc.as_leaf(), Some(&encode(&v).unwrap().0));
        assert_eq!(nf(&CoddExpr::decoder(), &[enc]), v);
    }

    #[test]
    fn decode_of_garbage_is_an_error() {
        let err = eval_codd(&CoddExpr::decoder(), &[leaf("101")], fuel()).unwrap_err();
        assert!(matches!(err, Error::Decode { offset: 0, .. }));
    }

    #[test]
    fn higher_order_query_on_an_encoding() {
        // a decision node reading the first header bit of an encoded dag
        let q = CoddExpr::decide(15, &leaf("0"), &leaf("1"));
        let e = CoddExpr::apply(&CoddExpr::encoder(), &CoddExpr::k());
        // K encodes with node count 1, so header bit 15 is 1
        assert_eq!(nf(&q, &[e]), leaf("1"));
    }

    #[test]
    fn omega_runs_out_of_fuel() {
        // S I I (S I I) with I = S K K
        let i = CoddExpr::apply_all(&CoddExpr::s(), &[&CoddExpr::k(), &CoddExpr::k()]);
        let sii = CoddExpr::apply_all(&CoddExpr::s(), &[&i, &i]);
        let r = eval_codd(&sii, std::slice::from_ref(&sii), Fuel::new(500).unwrap()).unwrap();
        assert_eq!(r.outcome, Outcome::FuelExhausted);
        assert_eq!(r.steps, 500);
        assert!(Fuel::new(0).is_err());
    }
}
