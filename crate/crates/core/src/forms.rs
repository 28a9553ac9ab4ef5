//! Matrices over a patch ring and matrix-valued differential forms in
//! degrees 0, 1 and 2, with exterior derivative, wedge, gauge transformation
//! of connection forms and curvature.
//!
//! One-forms are stored per coordinate (`comps[i]` is the `dt_{i+1}`
//! coefficient) and two-forms per index pair `i < j` (the `dt_{i+1} ^
//! dt_{j+1}` coefficient); antisymmetry is representational, zero
//! coefficients are pruned, so structural equality decides identities.
//! Degrees above 2 never occur here: curvature lives in degree 2.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::CoeffRing;
use crate::laurent::{Laurent, PolyInvert, RingTag};
use crate::Error;

/// A rectangular matrix with polynomial entries, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<R: CoeffRing> {
    tag: RingTag<R>,
    rows: usize,
    cols: usize,
    entries: Vec<Laurent<R>>,
}

impl<R: CoeffRing> Mat<R> {
    pub fn new(tag: &RingTag<R>, rows: usize, cols: usize, entries: Vec<Laurent<R>>) -> Mat<R> {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        for e in &entries {
            assert_eq!(e.tag(), tag, "matrix entry with foreign ring tag");
        }
        Mat {
            tag: tag.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(tag: &RingTag<R>, rows: Vec<Vec<Laurent<R>>>) -> Mat<R> {
        let r = rows.len();
        assert!(r >= 1, "matrix needs at least one row");
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Mat::new(tag, r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(
        tag: &RingTag<R>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Laurent<R>,
    ) -> Mat<R> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Mat::new(tag, rows, cols, entries)
    }

    pub fn zero(tag: &RingTag<R>, rows: usize, cols: usize) -> Mat<R> {
        Mat::from_fn(tag, rows, cols, |_, _| Laurent::zero(tag))
    }

    pub fn identity(tag: &RingTag<R>, n: usize) -> Mat<R> {
        Mat::from_fn(tag, n, n, |i, j| {
            if i == j {
                Laurent::one(tag)
            } else {
                Laurent::zero(tag)
            }
        })
    }

    pub fn tag(&self) -> &RingTag<R> {
        &self.tag
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Laurent<R> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Laurent<R>) {
        assert_eq!(v.tag(), &self.tag, "matrix entry with foreign ring tag");
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Laurent::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    fn assert_same_shape(&self, other: &Mat<R>) {
        assert_eq!(self.tag, other.tag, "matrix ring tag mismatch");
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "matrix shape mismatch {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub fn add(&self, other: &Mat<R>) -> Mat<R> {
        self.assert_same_shape(other);
        Mat::from_fn(&self.tag, self.rows, self.cols, |i, j| {
            self.at(i, j).add(other.at(i, j))
        })
    }

    pub fn sub(&self, other: &Mat<R>) -> Mat<R> {
        self.assert_same_shape(other);
        Mat::from_fn(&self.tag, self.rows, self.cols, |i, j| {
            self.at(i, j).sub(other.at(i, j))
        })
    }

    pub fn neg(&self) -> Mat<R> {
        Mat::from_fn(&self.tag, self.rows, self.cols, |i, j| self.at(i, j).neg())
    }

    pub fn mul(&self, other: &Mat<R>) -> Mat<R> {
        assert_eq!(self.tag, other.tag, "matrix ring tag mismatch");
        assert_eq!(self.cols, other.rows, "matrix shape mismatch in product");
        Mat::from_fn(&self.tag, self.rows, other.cols, |i, j| {
            let mut acc = Laurent::zero(&self.tag);
            for k in 0..self.cols {
                acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
            }
            acc
        })
    }

    pub fn scale(&self, c: &Laurent<R>) -> Mat<R> {
        Mat::from_fn(&self.tag, self.rows, self.cols, |i, j| self.at(i, j).mul(c))
    }

    pub fn pow(&self, exp: usize) -> Mat<R> {
        assert_eq!(self.rows, self.cols, "matrix power needs a square matrix");
        let mut acc = Mat::identity(&self.tag, self.rows);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn map(&self, mut f: impl FnMut(&Laurent<R>) -> Laurent<R>) -> Mat<R> {
        Mat::from_fn(&self.tag, self.rows, self.cols, |i, j| f(self.at(i, j)))
    }

    pub fn extend_tag(&self, target: &RingTag<R>) -> Mat<R> {
        Mat::from_fn(target, self.rows, self.cols, |i, j| {
            self.at(i, j).extend_tag(target)
        })
    }

    pub fn commutes_with(&self, other: &Mat<R>) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// Determinant by cofactor expansion; the matrices here have rank <= 4.
    pub fn det(&self) -> Laurent<R> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        self.det_rec(&(0..self.cols).collect::<Vec<_>>(), 0)
    }

    fn det_rec(&self, cols: &[usize], row: usize) -> Laurent<R> {
        if cols.len() == 1 {
            return self.at(row, cols[0]).clone();
        }
        let mut acc = Laurent::zero(&self.tag);
        for (k, &j) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != j).collect();
            let minor = self.det_rec(&rest, row + 1);
            let term = self.at(row, j).mul(&minor);
            acc = if k % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        acc
    }
}

impl<R: PolyInvert> Mat<R> {
    /// Inverse via adjugate and determinant inversion; exact over the
    /// commutative ring, fails when the determinant is not a unit.
    pub fn inverse(&self) -> Result<Mat<R>, Error> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let det = self.det();
        let det_inv = det
            .invert()
            .map_err(|_| Error::NotInvertible { det: det.render() })?;
        if n == 1 {
            return Ok(Mat::new(&self.tag, 1, 1, vec![det_inv]));
        }
        let adjugate = Mat::from_fn(&self.tag, n, n, |i, j| {
            // cofactor C_{j,i}: the adjugate is the transposed cofactor matrix
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = self.minor_det(&rows, &cols);
            if (i + j) % 2 == 0 {
                minor
            } else {
                minor.neg()
            }
        });
        Ok(adjugate.scale(&det_inv))
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Laurent<R> {
        let sub = Mat::from_fn(&self.tag, rows.len(), cols.len(), |i, j| {
            self.at(rows[i], cols[j]).clone()
        });
        sub.det()
    }
}

impl<R: CoeffRing> fmt::Display for Mat<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A scalar one-form `sum_i comps[i] dt_{i+1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Form1<R: CoeffRing> {
    tag: RingTag<R>,
    comps: Vec<Laurent<R>>,
}

impl<R: CoeffRing> Form1<R> {
    pub fn new(tag: &RingTag<R>, comps: Vec<Laurent<R>>) -> Form1<R> {
        assert_eq!(comps.len(), tag.nvars(), "one component per coordinate");
        for c in &comps {
            assert_eq!(c.tag(), tag, "form component with foreign ring tag");
        }
        Form1 {
            tag: tag.clone(),
            comps,
        }
    }

    pub fn zero(tag: &RingTag<R>) -> Form1<R> {
        Form1::new(tag, vec![Laurent::zero(tag); tag.nvars()])
    }

    pub fn tag(&self) -> &RingTag<R> {
        &self.tag
    }

    pub fn component(&self, i: usize) -> &Laurent<R> {
        &self.comps[i]
    }

    pub fn components(&self) -> &[Laurent<R>] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Laurent::is_zero)
    }

    pub fn add(&self, other: &Form1<R>) -> Form1<R> {
        assert_eq!(self.tag, other.tag, "form ring tag mismatch");
        Form1::new(
            &self.tag,
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Form1<R>) -> Form1<R> {
        assert_eq!(self.tag, other.tag, "form ring tag mismatch");
        Form1::new(
            &self.tag,
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Laurent<R>) -> Form1<R> {
        Form1::new(&self.tag, self.comps.iter().map(|a| a.mul(c)).collect())
    }

    pub fn extend_tag(&self, target: &RingTag<R>) -> Form1<R> {
        Form1::new(
            target,
            self.comps.iter().map(|c| c.extend_tag(target)).collect(),
        )
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({}) dt{}", c.render(), i + 1))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// A scalar two-form, coefficients stored for `i < j` only.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Form2<R: CoeffRing> {
    tag: RingTag<R>,
    comps: BTreeMap<(usize, usize), Laurent<R>>,
}

impl<R: CoeffRing> Form2<R> {
    pub fn zero(tag: &RingTag<R>) -> Form2<R> {
        Form2 {
            tag: tag.clone(),
            comps: BTreeMap::new(),
        }
    }

    fn insert(&mut self, i: usize, j: usize, v: Laurent<R>) {
        assert!(i < j, "two-form indices must be ordered");
        if !v.is_zero() {
            self.comps.insert((i, j), v);
        }
    }

    pub fn tag(&self) -> &RingTag<R> {
        &self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, i: usize, j: usize) -> Option<&Laurent<R>> {
        self.comps.get(&(i, j))
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &Laurent<R>)> {
        self.comps.iter()
    }

    pub fn render(&self) -> String {
        if self.comps.is_empty() {
            return "0".to_string();
        }
        self.comps
            .iter()
            .map(|((i, j), c)| format!("({}) dt{}^dt{}", c.render(), i + 1, j + 1))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Exterior derivative of a function.
pub fn d0<R: CoeffRing>(f: &Laurent<R>) -> Form1<R> {
    let tag = f.tag().clone();
    Form1::new(&tag, (0..tag.nvars()).map(|i| f.deriv(i)).collect())
}

/// Exterior derivative of a one-form: the `dt_i ^ dt_j` coefficient is
/// `d_i w_j - d_j w_i`.
pub fn d1<R: CoeffRing>(w: &Form1<R>) -> Form2<R> {
    let tag = w.tag().clone();
    let mut out = Form2::zero(&tag);
    for i in 0..tag.nvars() {
        for j in (i + 1)..tag.nvars() {
            out.insert(i, j, w.component(j).deriv(i).sub(&w.component(i).deriv(j)));
        }
    }
    out
}

/// A matrix-valued one-form: one coefficient matrix per coordinate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatForm1<R: CoeffRing> {
    comps: Vec<Mat<R>>,
}

impl<R: CoeffRing> MatForm1<R> {
    pub fn new(comps: Vec<Mat<R>>) -> MatForm1<R> {
        assert!(
            !comps.is_empty(),
            "a one-form needs at least one coordinate"
        );
        let tag = comps[0].tag().clone();
        assert_eq!(comps.len(), tag.nvars(), "one matrix per coordinate");
        for c in &comps {
            assert_eq!(c.tag(), &tag, "component with foreign ring tag");
            assert!(
                c.rows() == comps[0].rows() && c.cols() == comps[0].cols(),
                "component shape mismatch"
            );
        }
        MatForm1 { comps }
    }

    pub fn zero(tag: &RingTag<R>, rows: usize, cols: usize) -> MatForm1<R> {
        MatForm1::new(vec![Mat::zero(tag, rows, cols); tag.nvars()])
    }

    pub fn tag(&self) -> &RingTag<R> {
        self.comps[0].tag()
    }

    pub fn rows(&self) -> usize {
        self.comps[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.comps[0].cols()
    }

    pub fn component(&self, i: usize) -> &Mat<R> {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut Mat<R> {
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[Mat<R>] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Mat::is_zero)
    }

    pub fn add(&self, other: &MatForm1<R>) -> MatForm1<R> {
        MatForm1::new(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &MatForm1<R>) -> MatForm1<R> {
        MatForm1::new(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    /// Matrix times form, `M . A`.
    pub fn left_mul(&self, m: &Mat<R>) -> MatForm1<R> {
        MatForm1::new(self.comps.iter().map(|a| m.mul(a)).collect())
    }

    /// Form times matrix, `A . M`.
    pub fn right_mul(&self, m: &Mat<R>) -> MatForm1<R> {
        MatForm1::new(self.comps.iter().map(|a| a.mul(m)).collect())
    }

    pub fn extend_tag(&self, target: &RingTag<R>) -> MatForm1<R> {
        MatForm1::new(self.comps.iter().map(|c| c.extend_tag(target)).collect())
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c} dt{}", i + 1))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// A matrix-valued two-form, `i < j` components only, zeros pruned.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatForm2<R: CoeffRing> {
    tag: RingTag<R>,
    comps: BTreeMap<(usize, usize), Mat<R>>,
}

impl<R: CoeffRing> MatForm2<R> {
    pub fn zero(tag: &RingTag<R>) -> MatForm2<R> {
        MatForm2 {
            tag: tag.clone(),
            comps: BTreeMap::new(),
        }
    }

    fn insert(&mut self, i: usize, j: usize, m: Mat<R>) {
        assert!(i < j, "two-form indices must be ordered");
        if !m.is_zero() {
            self.comps.insert((i, j), m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, i: usize, j: usize) -> Option<&Mat<R>> {
        self.comps.get(&(i, j))
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &Mat<R>)> {
        self.comps.iter()
    }

    pub fn render(&self) -> String {
        if self.comps.is_empty() {
            return "0".to_string();
        }
        self.comps
            .iter()
            .map(|((i, j), m)| format!("{m} dt{}^dt{}", i + 1, j + 1))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Entrywise exterior derivative of a matrix of functions.
pub fn mat_d<R: CoeffRing>(m: &Mat<R>) -> MatForm1<R> {
    let tag = m.tag().clone();
    MatForm1::new((0..tag.nvars()).map(|i| m.map(|e| e.deriv(i))).collect())
}

/// Entrywise exterior derivative of a matrix one-form.
pub fn mat_d1<R: CoeffRing>(a: &MatForm1<R>) -> MatForm2<R> {
    let tag = a.tag().clone();
    let mut out = MatForm2::zero(&tag);
    for i in 0..tag.nvars() {
        for j in (i + 1)..tag.nvars() {
            let v = a
                .component(j)
                .map(|e| e.deriv(i))
                .sub(&a.component(i).map(|e| e.deriv(j)));
            out.insert(i, j, v);
        }
    }
    out
}

/// Wedge of two matrix one-forms: the `dt_i ^ dt_j` coefficient (`i < j`)
/// is `a_i b_j - a_j b_i` with matrix products.
pub fn wedge11<R: CoeffRing>(a: &MatForm1<R>, b: &MatForm1<R>) -> MatForm2<R> {
    let tag = a.tag().clone();
    assert_eq!(&tag, b.tag(), "wedge ring tag mismatch");
    assert_eq!(a.cols(), b.rows(), "wedge shape mismatch");
    let mut out = MatForm2::zero(&tag);
    for i in 0..tag.nvars() {
        for j in (i + 1)..tag.nvars() {
            let v = a
                .component(i)
                .mul(b.component(j))
                .sub(&a.component(j).mul(b.component(i)));
            out.insert(i, j, v);
        }
    }
    out
}

/// Connection-form change of basis `dM M^-1 + M A M^-1`.
pub fn gauge_transform<R: PolyInvert>(a: &MatForm1<R>, m: &Mat<R>) -> Result<MatForm1<R>, Error> {
    assert_eq!(a.tag(), m.tag(), "gauge ring tag mismatch");
    assert!(
        m.rows() == m.cols() && m.rows() == a.rows() && a.rows() == a.cols(),
        "gauge shape mismatch"
    );
    let m_inv = m.inverse()?;
    let dm = mat_d(m);
    Ok(dm.right_mul(&m_inv).add(&a.left_mul(m).right_mul(&m_inv)))
}

/// Curvature `dA + A ^ A` of the connection `d + A`.
pub fn curvature<R: CoeffRing>(a: &MatForm1<R>) -> MatForm2<R> {
    assert_eq!(
        a.rows(),
        a.cols(),
        "curvature needs a square connection form"
    );
    let tag = a.tag().clone();
    let mut da = mat_d1(a);
    let wedge = wedge11(a, a);
    let mut sum = MatForm2::zero(&tag);
    let keys: std::collections::BTreeSet<(usize, usize)> =
        da.comps.keys().chain(wedge.comps.keys()).copied().collect();
    for (i, j) in keys {
        let zero = Mat::zero(&tag, a.rows(), a.cols());
        let x = da.comps.remove(&(i, j)).unwrap_or_else(|| zero.clone());
        let y = wedge.comps.get(&(i, j)).cloned().unwrap_or(zero);
        sum.insert(i, j, x.add(&y));
    }
    sum
}
