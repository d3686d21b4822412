//! Weighted evaluation of symbolic automata and the robustness monitor.

use crate::automaton::{decorate, translate, translate_negation, AutomatonError, Swa, SymbolicAutomaton};
use crate::distance::{vpd, DistanceError, Grid, PointwiseDistance};
use crate::exec::Execution;
use crate::predicate::{Cmp, Literal, PredicateError, Valuation};
use crate::semiring::{Semiring, Weight};
use crate::spec::{eval_stl, sre_accepts, Spec, Trace};

/// Upper bound on the number of runs [`path_oracle`] will enumerate.
pub const PATH_LIMIT: usize = 1_000_000;
/// Upper bound on the number of candidate traces [`trace_distance_oracle`]
/// will enumerate.
pub const TRACE_LIMIT: usize = 10_000_000;

#[derive(Debug, thiserror::Error)]
pub enum MonitorError {
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("stream already closed")]
    Closed,
    #[error("oracle bound exceeded: more than {0} candidates")]
    TooLarge(usize),
}

#[derive(Debug, Clone)]
enum CLit {
    Const(bool),
    Cmp { var: usize, strict: bool, k: f64, pos: bool },
}

#[derive(Debug, Clone)]
struct CEdge {
    src: usize,
    dst: usize,
    clauses: Vec<Vec<CLit>>,
}

/// A weighted automaton with guards compiled against variable indices.
#[derive(Debug, Clone)]
pub struct CompiledSwa {
    semiring: Semiring,
    distance: PointwiseDistance,
    variables: Vec<String>,
    initial: Vec<bool>,
    finals: Vec<bool>,
    edges: Vec<CEdge>,
}

impl CompiledSwa {
    pub fn new(swa: &Swa) -> Result<Self, MonitorError> {
        let a = &swa.automaton;
        let index = |v: &str| {
            a.variables
                .iter()
                .position(|w| w == v)
                .ok_or_else(|| PredicateError::UnboundVariable(v.to_string()))
        };
        let mut edges = Vec::with_capacity(a.transitions.len());
        for t in &a.transitions {
            if swa.semiring == Semiring::Tropical && !t.guard.wedge_minimal {
                return Err(DistanceError::NotWedgeMinimal.into());
            }
            let mut clauses = Vec::new();
            for c in &t.guard.clauses {
                let mut out = Vec::new();
                for l in c {
                    out.push(match l {
                        Literal::True => CLit::Const(true),
                        Literal::False => CLit::Const(false),
                        Literal::Pos(at) | Literal::Neg(at) => CLit::Cmp {
                            var: index(&at.var)?,
                            strict: at.cmp == Cmp::Lt,
                            k: at.k,
                            pos: matches!(l, Literal::Pos(_)),
                        },
                    });
                }
                clauses.push(out);
            }
            edges.push(CEdge { src: t.src, dst: t.dst, clauses });
        }
        let n = a.num_locations;
        Ok(CompiledSwa {
            semiring: swa.semiring,
            distance: swa.distance,
            variables: a.variables.clone(),
            initial: (0..n).map(|q| a.initial.contains(&q)).collect(),
            finals: (0..n).map(|q| a.finals.contains(&q)).collect(),
            edges,
        })
    }

    pub fn num_locations(&self) -> usize {
        self.initial.len()
    }

    /// Edge weight and whether the guard holds exactly.
    fn weight(&self, e: &CEdge, x: &[f64]) -> (Weight, bool) {
        let s = self.semiring;
        let mut acc = s.zero();
        let mut exact = false;
        for c in &e.clauses {
            let mut w = s.one();
            let mut ok = true;
            for l in c {
                match *l {
                    CLit::Const(true) => {}
                    CLit::Const(false) => {
                        w = s.zero();
                        ok = false;
                    }
                    CLit::Cmp { var, strict, k, pos } => {
                        let v = x[var];
                        let below = if strict { v < k } else { v <= k };
                        if below != pos {
                            ok = false;
                            w = s.otimes(w, self.distance.eval(v, k));
                        }
                    }
                }
            }
            exact |= ok;
            acc = s.oplus(acc, w);
        }
        (acc, exact)
    }
}

/// Incremental forward evaluation of a weighted automaton.
///
/// After `k` samples, `cost[q]` is the (+)-sum over runs of length `k` ending
/// in `q` of the (x)-product of edge weights. Alongside it the stream keeps
/// the locations reachable by exactly satisfied guards and the locations
/// reachable at all.
#[derive(Debug, Clone)]
pub struct ValStream {
    swa: CompiledSwa,
    cost: Vec<Weight>,
    next: Vec<Weight>,
    exact: Vec<bool>,
    reach: Vec<bool>,
    values: Vec<f64>,
    len: usize,
    closed: bool,
}

impl ValStream {
    pub fn new(swa: &Swa) -> Result<Self, MonitorError> {
        Ok(Self::compiled(CompiledSwa::new(swa)?))
    }

    pub fn compiled(swa: CompiledSwa) -> Self {
        let s = swa.semiring;
        let n = swa.num_locations();
        let cost = swa.initial.iter().map(|&i| if i { s.one() } else { s.zero() }).collect();
        ValStream {
            cost,
            next: vec![s.zero(); n],
            exact: swa.initial.clone(),
            reach: swa.initial.clone(),
            values: vec![0.0; swa.variables.len()],
            len: 0,
            closed: false,
            swa,
        }
    }

    pub fn push(&mut self, v: &Valuation) -> Result<Weight, MonitorError> {
        if self.closed {
            return Err(MonitorError::Closed);
        }
        for (i, name) in self.swa.variables.iter().enumerate() {
            self.values[i] = v.get(name)?;
        }
        let s = self.swa.semiring;
        let n = self.cost.len();
        self.next.iter_mut().for_each(|c| *c = s.zero());
        let mut exact = vec![false; n];
        let mut reach = vec![false; n];
        for e in &self.swa.edges {
            if !self.reach[e.src] {
                continue;
            }
            reach[e.dst] = true;
            let (w, ok) = self.swa.weight(e, &self.values);
            self.next[e.dst] = s.oplus(self.next[e.dst], s.otimes(self.cost[e.src], w));
            exact[e.dst] |= ok && self.exact[e.src];
        }
        std::mem::swap(&mut self.cost, &mut self.next);
        self.exact = exact;
        self.reach = reach;
        self.len += 1;
        Ok(self.value())
    }

    /// Current cost of every location.
    pub fn costs(&self) -> &[Weight] {
        &self.cost
    }

    /// (+) over final locations.
    pub fn value(&self) -> Weight {
        self.sum_where(true)
    }

    /// (+) over non-final locations. On a complete deterministic automaton
    /// this is the value of the complement.
    pub fn co_value(&self) -> Weight {
        self.sum_where(false)
    }

    fn sum_where(&self, fin: bool) -> Weight {
        let s = self.swa.semiring;
        s.sum((0..self.cost.len()).filter(|&q| self.swa.finals[q] == fin).map(|q| self.cost[q]))
    }

    /// Whether the samples so far are accepted (exact semantics).
    pub fn accepted(&self) -> bool {
        (0..self.cost.len()).any(|q| self.exact[q] && self.swa.finals[q])
    }

    /// Whether some run of the current length ends in a final location,
    /// ignoring guard values.
    pub fn final_reachable(&self) -> bool {
        self.reachable_where(true)
    }

    fn reachable_where(&self, fin: bool) -> bool {
        (0..self.cost.len()).any(|q| self.reach[q] && self.swa.finals[q] == fin)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Close the stream and return the final value; later pushes fail.
    pub fn close(&mut self) -> Weight {
        self.closed = true;
        self.value()
    }
}

/// Value of a weighted automaton on a whole trace.
pub fn val(swa: &Swa, samples: &[Valuation]) -> Result<Weight, MonitorError> {
    let mut st = ValStream::new(swa)?;
    for v in samples {
        st.push(v)?;
    }
    Ok(st.close())
}

/// Combine the two automaton values into a signed robustness.
///
/// `v_pos = one` means the trace is at distance zero from the language, so
/// the sign is positive and the magnitude is the distance to the complement.
/// When an automaton has no run of the trace length ending in a final
/// location at all, the corresponding distance is taken as infinite; this
/// matters for the boolean semiring, whose zero is finite.
pub fn rob(s: Semiring, v_pos: Weight, v_neg: Weight, pos_live: bool, neg_live: bool) -> f64 {
    if v_pos == s.one() {
        if neg_live {
            v_neg
        } else {
            f64::INFINITY
        }
    } else if pos_live {
        -v_pos
    } else {
        f64::NEG_INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessVerdict {
    pub rho: f64,
    pub satisfied: bool,
    pub v_pos: Weight,
    pub v_neg: Weight,
}

/// Whether the whole trace satisfies the specification.
pub fn satisfies(spec: &Spec, trace: &Trace) -> Result<bool, PredicateError> {
    match spec {
        Spec::Stl(f) => eval_stl(trace, 0, f),
        Spec::Sre(e) => sre_accepts(trace, e),
    }
}

#[derive(Debug, Clone)]
pub struct RobustnessMonitor {
    spec: Spec,
    semiring: Semiring,
    pos: Swa,
    neg: Option<Swa>,
    pos_c: CompiledSwa,
    neg_c: Option<CompiledSwa>,
}

impl RobustnessMonitor {
    pub fn new(spec: Spec, semiring: Semiring) -> Result<Self, MonitorError> {
        Self::with_distance(spec, semiring, PointwiseDistance::default_for(semiring))
    }

    pub fn with_distance(spec: Spec, semiring: Semiring, d: PointwiseDistance) -> Result<Self, MonitorError> {
        let a = translate(&spec)?;
        let neg = if a.is_deterministic_complete() {
            None
        } else {
            Some(translate_negation(&spec)?)
        };
        Self::from_automata(spec, &a, neg.as_ref(), semiring, d)
    }

    /// Monitor over given automata for the specification and its negation.
    /// Without a negation automaton, `pos` must be complete and
    /// deterministic and the complement is read off its non-final locations.
    pub fn from_automata(
        spec: Spec,
        pos: &SymbolicAutomaton,
        neg: Option<&SymbolicAutomaton>,
        semiring: Semiring,
        d: PointwiseDistance,
    ) -> Result<Self, MonitorError> {
        if neg.is_none() && !pos.is_deterministic_complete() {
            return Err(AutomatonError::Invalid("complement shortcut needs a complete deterministic automaton".into()).into());
        }
        let pos = decorate(pos, semiring, d);
        let neg = neg.map(|n| decorate(n, semiring, d));
        let pos_c = CompiledSwa::new(&pos)?;
        let neg_c = neg.as_ref().map(CompiledSwa::new).transpose()?;
        Ok(RobustnessMonitor { spec, semiring, pos, neg, pos_c, neg_c })
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn positive(&self) -> &Swa {
        &self.pos
    }

    /// `None` when the complement is read off the positive automaton.
    pub fn negative(&self) -> Option<&Swa> {
        self.neg.as_ref()
    }

    fn streams(&self) -> (ValStream, Option<ValStream>) {
        (ValStream::compiled(self.pos_c.clone()), self.neg_c.clone().map(ValStream::compiled))
    }

    fn verdict(&self, p: &ValStream, n: &Option<ValStream>, satisfied: bool) -> RobustnessVerdict {
        let v_pos = p.value();
        let (v_neg, neg_live) = match n {
            Some(n) => (n.value(), n.final_reachable()),
            None => (p.co_value(), p.reachable_where(false)),
        };
        let rho = rob(self.semiring, v_pos, v_neg, p.final_reachable(), neg_live);
        RobustnessVerdict { rho, satisfied, v_pos, v_neg }
    }

    pub fn evaluate(&self, trace: &Trace) -> Result<RobustnessVerdict, MonitorError> {
        let (mut p, mut n) = self.streams();
        for v in &trace.samples {
            p.push(v)?;
            if let Some(n) = n.as_mut() {
                n.push(v)?;
            }
        }
        let sat = satisfies(&self.spec, trace)?;
        Ok(self.verdict(&p, &n, sat))
    }

    /// Verdict after each prefix `1..=n`. Satisfaction is read from exact
    /// acceptance of the positive automaton.
    pub fn prefix_series(&self, trace: &Trace) -> Result<Vec<RobustnessVerdict>, MonitorError> {
        let (mut p, mut n) = self.streams();
        let mut out = Vec::with_capacity(trace.len());
        for v in &trace.samples {
            p.push(v)?;
            if let Some(n) = n.as_mut() {
                n.push(v)?;
            }
            out.push(self.verdict(&p, &n, p.accepted()));
        }
        Ok(out)
    }

    pub fn evaluate_batch(&self, traces: &[Trace], exec: Execution) -> Vec<Result<RobustnessVerdict, MonitorError>> {
        exec.map(traces, |t| self.evaluate(t))
    }
}

/// Brute force over runs: (+) over accepting runs of the (x)-product of
/// [`vpd`] edge weights.
pub fn path_oracle(swa: &Swa, samples: &[Valuation]) -> Result<Weight, MonitorError> {
    let a = &swa.automaton;
    let s = swa.semiring;
    let mut count = 0usize;
    let mut best = s.zero();
    // explicit stack of (location, depth, accumulated weight)
    let mut stack: Vec<(usize, usize, Weight)> = a.initial.iter().map(|&q| (q, 0, s.one())).collect();
    while let Some((q, k, w)) = stack.pop() {
        if k == samples.len() {
            count += 1;
            if count > PATH_LIMIT {
                return Err(MonitorError::TooLarge(PATH_LIMIT));
            }
            if a.finals.contains(&q) {
                best = s.oplus(best, w);
            }
            continue;
        }
        for t in a.outgoing(q) {
            let tw = vpd(&samples[k], &t.guard, s, swa.distance)?;
            stack.push((t.dst, k + 1, s.otimes(w, tw)));
        }
    }
    Ok(best)
}

/// Brute force over traces: (+) over all traces of the same length with
/// values on `grid` that satisfy `spec`, of the (x)-product over samples and
/// variables of the pointwise distance to `trace`.
pub fn trace_distance_oracle(
    spec: &Spec,
    trace: &Trace,
    s: Semiring,
    d: PointwiseDistance,
    grid: Grid,
    exec: Execution,
) -> Result<Weight, MonitorError> {
    let vars: Vec<String> = spec.variables().into_iter().collect();
    let cells = trace.len() * vars.len();
    let pts: Vec<f64> = grid.points().collect();
    let total = (pts.len() as u128).pow(cells as u32);
    if total > TRACE_LIMIT as u128 {
        return Err(MonitorError::TooLarge(TRACE_LIMIT));
    }
    let originals: Vec<Vec<f64>> = trace
        .samples
        .iter()
        .map(|v| vars.iter().map(|x| v.get(x)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let parts = exec.map_range(total as usize, |mut idx| -> Result<Weight, PredicateError> {
        let mut w = s.one();
        let mut cand = Trace::new(vars.clone());
        for row in &originals {
            let mut v = Valuation::new();
            for (x, &orig) in vars.iter().zip(row) {
                let p = pts[idx % pts.len()];
                idx /= pts.len();
                v.insert(x, p);
                w = s.otimes(w, d.eval(orig, p));
            }
            cand.push(v);
        }
        Ok(if satisfies(spec, &cand)? { w } else { s.zero() })
    });
    let mut best = s.zero();
    for p in parts {
        best = s.oplus(best, p?);
    }
    Ok(best)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::automaton::test::g;
    use crate::syntax::parse_spec;

    /// q0 loops on true, two steps on x <= 3 && y >= 6 reach q2, q2 loops.
    fn w_ex() -> SymbolicAutomaton {
        let mut a = SymbolicAutomaton::new(vec!["x".into(), "y".into()], 3);
        a.initial.insert(0);
        a.finals.insert(2);
        a.add_transition(0, g("true"), 0);
        a.add_transition(0, g("x <= 3 && !(y < 6)"), 1);
        a.add_transition(1, g("x <= 3 && !(y < 6)"), 2);
        a.add_transition(2, g("true"), 2);
        a
    }

    fn tau() -> Trace {
        Trace::from_rows(&["x", "y"], &[vec![4.0, 2.0], vec![5.0, 3.0], vec![2.0, 5.0], vec![3.0, 5.0]])
    }

    #[test]
    fn fixture_values() {
        let t = tau();
        for (s, want) in [(Semiring::Boolean, 1.0), (Semiring::MinMax, 1.0), (Semiring::Tropical, 2.0)] {
            let w = decorate(&w_ex(), s, PointwiseDistance::default_for(s));
            assert_eq!(val(&w, &t.samples).unwrap(), want, "{s}");
            assert_eq!(path_oracle(&w, &t.samples).unwrap(), want, "{s}");
        }
    }

    #[test]
    fn stream_prefix_values() {
        let w = decorate(&w_ex(), Semiring::MinMax, PointwiseDistance::AbsDiff);
        let mut st = ValStream::new(&w).unwrap();
        let got: Vec<f64> = tau().samples.iter().map(|v| st.push(v).unwrap()).collect();
        assert_eq!(got, vec![f64::INFINITY, 4.0, 3.0, 1.0]);
        st.close();
        assert!(matches!(st.push(&tau().samples[0]), Err(MonitorError::Closed)));
    }

    #[test]
    fn robustness_signs() {
        let spec = parse_spec("G x <= 3").unwrap();
        let m = RobustnessMonitor::new(spec, Semiring::MinMax).unwrap();
        let t = Trace::from_rows(&["x"], &[vec![1.0], vec![2.0]]);
        let r = m.evaluate(&t).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.rho, 1.0);
        let t = Trace::from_rows(&["x"], &[vec![1.0], vec![7.0]]);
        let r = m.evaluate(&t).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.rho, -4.0);
    }

    #[test]
    fn boolean_emptiness_gives_infinity() {
        let spec = parse_spec("x <= 1 && x > 1").unwrap();
        let m = RobustnessMonitor::new(spec, Semiring::Boolean).unwrap();
        let r = m.evaluate(&Trace::from_rows(&["x"], &[vec![0.0]])).unwrap();
        assert_eq!(r.rho, f64::NEG_INFINITY);
        let spec = parse_spec("x <= 1 || x > 1").unwrap();
        let m = RobustnessMonitor::new(spec, Semiring::Boolean).unwrap();
        let r = m.evaluate(&Trace::from_rows(&["x"], &[vec![0.0]])).unwrap();
        assert_eq!(r.rho, f64::INFINITY);
    }

    #[test]
    fn prefix_series_matches_prefix_evaluation() {
        let spec = parse_spec("F[0,2] (x >= 3 && X x <= 0)").unwrap();
        let t = Trace::from_rows(&["x"], &[vec![1.0], vec![4.0], vec![2.0], vec![0.0], vec![5.0]]);
        for s in Semiring::ALL {
            let m = RobustnessMonitor::new(spec.clone(), s).unwrap();
            let series = m.prefix_series(&t).unwrap();
            for (k, v) in series.iter().enumerate() {
                let whole = m.evaluate(&t.prefix(k + 1)).unwrap();
                assert_eq!(*v, whole, "{s} at {k}");
            }
        }
    }

    #[test]
    fn trace_distance_matches_val() {
        let spec = parse_spec("G (x <= 2 || X x >= 3)").unwrap();
        let t = Trace::from_rows(&["x"], &[vec![4.0], vec![1.0], vec![3.0]]);
        let a = translate(&spec).unwrap();
        for s in [Semiring::MinMax, Semiring::Tropical] {
            let w = decorate(&a, s, PointwiseDistance::AbsDiff);
            let o = trace_distance_oracle(&spec, &t, s, PointwiseDistance::AbsDiff, Grid::new(0, 4), Execution::Parallel);
            assert_eq!(val(&w, &t.samples).unwrap(), o.unwrap(), "{s}");
        }
    }

    #[test]
    fn batch_modes_agree() {
        let spec = parse_spec("F x >= 3").unwrap();
        let m = RobustnessMonitor::new(spec, Semiring::Tropical).unwrap();
        let ts: Vec<Trace> = (0..20).map(|i| Trace::from_rows(&["x"], &[vec![i as f64 % 5.0], vec![1.0]])).collect();
        let a: Vec<_> = m.evaluate_batch(&ts, Execution::Sequential).into_iter().map(Result::unwrap).collect();
        let b: Vec<_> = m.evaluate_batch(&ts, Execution::Parallel).into_iter().map(Result::unwrap).collect();
        assert_eq!(a, b);
    }
}
