//! Reverse-mode automatic differentiation on `f64` matrices.
//!
//! The training objective is assembled as a graph of matrix operations on
//! a [`Tape`]; [`Tape::backward`] then accumulates gradients for every
//! node in one reverse sweep. Scalars are `1x1` matrices and vectors are
//! `1xd` rows, so a single node type covers the whole objective.
//!
//! Shape mismatches between operands are programming errors, not runtime
//! conditions, and panic with the offending shapes.

use ndarray::{concatenate, s, Array2, Axis};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    /// Matrix product `(n x m) . (m x p)`.
    MatMul(usize, usize),
    /// `(n x d) + (1 x d)` with the row broadcast down the rows.
    AddRow(usize, usize),
    Scale(usize, f64),
    AddConst(usize, f64),
    Recip(usize),
    Exp(usize),
    Ln(usize),
    Sqrt(usize),
    Tanh(usize),
    Softplus(usize),
    Square(usize),
    Neg(usize),
    /// Sum of all entries, producing `1 x 1`.
    SumAll(usize),
    /// Column sums: `n x d` to `1 x d`.
    SumRows(usize),
    ConcatCols(usize, usize),
    /// Columns `start..end` of the input.
    SliceCols(usize, usize, usize),
    /// Row gather; an input row may appear more than once.
    SelectRows(usize, Vec<usize>),
    /// `1 x d` tiled to `rows x d`.
    BroadcastRows(usize, usize),
    /// Elementwise `max(x, lo)`; gradient passes only where `x > lo`.
    ClampMin(usize, f64),
}

struct Node {
    value: Array2<f64>,
    op: Op,
}

/// Gradients of one scalar node w.r.t. every tape node, indexed by [`Var`].
///
/// Nodes the scalar does not depend on have no entry.
pub struct Gradients(Vec<Option<Array2<f64>>>);

impl Gradients {
    pub fn grad(&self, v: Var) -> Option<&Array2<f64>> {
        self.0[v.0].as_ref()
    }
}

/// Append-only operation record with forward values.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

fn stable_softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn stable_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    fn push(&mut self, value: Array2<f64>, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    /// Registers an input; gradients are reported for leaves like any node.
    pub fn leaf(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Leaf)
    }

    fn same_shape(&self, a: Var, b: Var, what: &str) {
        let (sa, sb) = (self.nodes[a.0].value.dim(), self.nodes[b.0].value.dim());
        assert_eq!(sa, sb, "{what}: operand shapes {sa:?} vs {sb:?}");
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.same_shape(a, b, "add");
        let v = &self.nodes[a.0].value + &self.nodes[b.0].value;
        self.push(v, Op::Add(a.0, b.0))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.same_shape(a, b, "sub");
        let v = &self.nodes[a.0].value - &self.nodes[b.0].value;
        self.push(v, Op::Sub(a.0, b.0))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.same_shape(a, b, "mul");
        let v = &self.nodes[a.0].value * &self.nodes[b.0].value;
        self.push(v, Op::Mul(a.0, b.0))
    }

    pub fn div(&mut self, a: Var, b: Var) -> Var {
        self.same_shape(a, b, "div");
        let v = &self.nodes[a.0].value / &self.nodes[b.0].value;
        self.push(v, Op::Div(a.0, b.0))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (na, ma) = self.nodes[a.0].value.dim();
        let (mb, pb) = self.nodes[b.0].value.dim();
        assert_eq!(ma, mb, "matmul: inner dimensions {na}x{ma} . {mb}x{pb}");
        let v = self.nodes[a.0].value.dot(&self.nodes[b.0].value);
        self.push(v, Op::MatMul(a.0, b.0))
    }

    /// `a + row` where `a` is `n x d` and `row` is `1 x d`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (_, d) = self.nodes[a.0].value.dim();
        let rd = self.nodes[row.0].value.dim();
        assert_eq!(rd, (1, d), "add_row: row shape {rd:?} against width {d}");
        let v = &self.nodes[a.0].value + &self.nodes[row.0].value;
        self.push(v, Op::AddRow(a.0, row.0))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let v = self.nodes[a.0].value.mapv(|x| c * x);
        self.push(v, Op::Scale(a.0, c))
    }

    pub fn add_const(&mut self, a: Var, c: f64) -> Var {
        let v = self.nodes[a.0].value.mapv(|x| x + c);
        self.push(v, Op::AddConst(a.0, c))
    }

    pub fn recip(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(|x| 1.0 / x);
        self.push(v, Op::Recip(a.0))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(f64::exp);
        self.push(v, Op::Exp(a.0))
    }

    pub fn ln(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(f64::ln);
        self.push(v, Op::Ln(a.0))
    }

    pub fn sqrt(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(f64::sqrt);
        self.push(v, Op::Sqrt(a.0))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(f64::tanh);
        self.push(v, Op::Tanh(a.0))
    }

    pub fn softplus(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(stable_softplus);
        self.push(v, Op::Softplus(a.0))
    }

    pub fn square(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(|x| x * x);
        self.push(v, Op::Square(a.0))
    }

    pub fn neg(&mut self, a: Var) -> Var {
        let v = self.nodes[a.0].value.mapv(|x| -x);
        self.push(v, Op::Neg(a.0))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let s = self.nodes[a.0].value.sum();
        self.push(Array2::from_elem((1, 1), s), Op::SumAll(a.0))
    }

    pub fn sum_rows(&mut self, a: Var) -> Var {
        let s = self.nodes[a.0].value.sum_axis(Axis(0)).insert_axis(Axis(0));
        self.push(s, Op::SumRows(a.0))
    }

    pub fn concat_cols(&mut self, a: Var, b: Var) -> Var {
        let (na, _) = self.nodes[a.0].value.dim();
        let (nb, _) = self.nodes[b.0].value.dim();
        assert_eq!(na, nb, "concat_cols: row counts {na} vs {nb}");
        let v = concatenate![Axis(1), self.nodes[a.0].value, self.nodes[b.0].value];
        self.push(v, Op::ConcatCols(a.0, b.0))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, end: usize) -> Var {
        let (_, d) = self.nodes[a.0].value.dim();
        assert!(start < end && end <= d, "slice_cols: {start}..{end} of width {d}");
        let v = self.nodes[a.0].value.slice(s![.., start..end]).to_owned();
        self.push(v, Op::SliceCols(a.0, start, end))
    }

    pub fn select_rows(&mut self, a: Var, rows: &[usize]) -> Var {
        let (n, _) = self.nodes[a.0].value.dim();
        assert!(rows.iter().all(|&r| r < n), "select_rows: index beyond {n} rows");
        let v = self.nodes[a.0].value.select(Axis(0), rows);
        self.push(v, Op::SelectRows(a.0, rows.to_vec()))
    }

    pub fn broadcast_rows(&mut self, a: Var, rows: usize) -> Var {
        let (n, d) = self.nodes[a.0].value.dim();
        assert_eq!(n, 1, "broadcast_rows: input must be a single row");
        let v = self.nodes[a.0]
            .value
            .broadcast((rows, d))
            .expect("row broadcast")
            .to_owned();
        self.push(v, Op::BroadcastRows(a.0, rows))
    }

    pub fn clamp_min(&mut self, a: Var, lo: f64) -> Var {
        let v = self.nodes[a.0].value.mapv(|x| x.max(lo));
        self.push(v, Op::ClampMin(a.0, lo))
    }

    /// Gradients of the scalar `root` w.r.t. every node, by one reverse
    /// sweep in tape order.
    pub fn backward(&self, root: Var) -> Gradients {
        assert_eq!(
            self.nodes[root.0].value.dim(),
            (1, 1),
            "backward root must be scalar"
        );
        let mut grads: Vec<Option<Array2<f64>>> = vec![None; self.nodes.len()];
        grads[root.0] = Some(Array2::ones((1, 1)));

        fn acc(slot: &mut Option<Array2<f64>>, delta: Array2<f64>) {
            match slot {
                Some(g) => *g += &delta,
                None => *slot = Some(delta),
            }
        }

        for id in (0..=root.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            // Inputs always precede their consumers, so the split borrow
            // below is safe: only slots before `id` are touched.
            match &self.nodes[id].op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    acc(&mut grads[*a], g.clone());
                    acc(&mut grads[*b], g.clone());
                }
                Op::Sub(a, b) => {
                    acc(&mut grads[*a], g.clone());
                    acc(&mut grads[*b], g.mapv(|x| -x));
                }
                Op::Mul(a, b) => {
                    acc(&mut grads[*a], &g * &self.nodes[*b].value);
                    acc(&mut grads[*b], &g * &self.nodes[*a].value);
                }
                Op::Div(a, b) => {
                    let vb = &self.nodes[*b].value;
                    acc(&mut grads[*a], &g / vb);
                    let out = &self.nodes[id].value;
                    acc(&mut grads[*b], -(&g * out) / vb);
                }
                Op::MatMul(a, b) => {
                    acc(&mut grads[*a], g.dot(&self.nodes[*b].value.t()));
                    acc(&mut grads[*b], self.nodes[*a].value.t().dot(&g));
                }
                Op::AddRow(a, row) => {
                    acc(&mut grads[*a], g.clone());
                    acc(&mut grads[*row], g.sum_axis(Axis(0)).insert_axis(Axis(0)));
                }
                Op::Scale(a, c) => acc(&mut grads[*a], g.mapv(|x| c * x)),
                Op::AddConst(a, _) => acc(&mut grads[*a], g.clone()),
                Op::Recip(a) => {
                    let out = &self.nodes[id].value;
                    acc(&mut grads[*a], -(&g * out * out));
                }
                Op::Exp(a) => acc(&mut grads[*a], &g * &self.nodes[id].value),
                Op::Ln(a) => acc(&mut grads[*a], &g / &self.nodes[*a].value),
                Op::Sqrt(a) => {
                    let out = &self.nodes[id].value;
                    acc(&mut grads[*a], &g / &out.mapv(|x| 2.0 * x));
                }
                Op::Tanh(a) => {
                    let out = &self.nodes[id].value;
                    acc(&mut grads[*a], &g * &out.mapv(|t| 1.0 - t * t));
                }
                Op::Softplus(a) => {
                    let sig = self.nodes[*a].value.mapv(stable_sigmoid);
                    acc(&mut grads[*a], &g * &sig);
                }
                Op::Square(a) => {
                    acc(&mut grads[*a], &g * &self.nodes[*a].value.mapv(|x| 2.0 * x));
                }
                Op::Neg(a) => acc(&mut grads[*a], g.mapv(|x| -x)),
                Op::SumAll(a) => {
                    let shape = self.nodes[*a].value.dim();
                    acc(&mut grads[*a], Array2::from_elem(shape, g[(0, 0)]));
                }
                Op::SumRows(a) => {
                    let (n, d) = self.nodes[*a].value.dim();
                    let tiled = g.broadcast((n, d)).expect("sum_rows grad").to_owned();
                    acc(&mut grads[*a], tiled);
                }
                Op::ConcatCols(a, b) => {
                    let (_, da) = self.nodes[*a].value.dim();
                    acc(&mut grads[*a], g.slice(s![.., ..da]).to_owned());
                    acc(&mut grads[*b], g.slice(s![.., da..]).to_owned());
                }
                Op::SliceCols(a, start, end) => {
                    let mut full = Array2::zeros(self.nodes[*a].value.dim());
                    full.slice_mut(s![.., *start..*end]).assign(&g);
                    acc(&mut grads[*a], full);
                }
                Op::SelectRows(a, rows) => {
                    let mut full = Array2::zeros(self.nodes[*a].value.dim());
                    for (out_row, &src) in rows.iter().enumerate() {
                        let mut dst = full.row_mut(src);
                        dst += &g.row(out_row);
                    }
                    acc(&mut grads[*a], full);
                }
                Op::BroadcastRows(a, _) => {
                    acc(&mut grads[*a], g.sum_axis(Axis(0)).insert_axis(Axis(0)));
                }
                Op::ClampMin(a, lo) => {
                    let mask = self.nodes[*a].value.mapv(|x| if x > *lo { 1.0 } else { 0.0 });
                    acc(&mut grads[*a], &g * &mask);
                }
            }
            grads[id] = Some(g);
        }
        Gradients(grads)
    }
}
