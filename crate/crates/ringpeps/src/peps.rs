//! The PEPS data structure on L1 x L2 square lattices.
//!
//! Site tensors are rank 5 with the fixed axis order `(l, r, u, d, s)`:
//! left/right virtual bonds run along a row (the second lattice extent),
//! up/down virtual bonds along a column (the first extent), `s` is the
//! physical index. Under open boundaries every dangling virtual bond has
//! dimension 1. Under cylindrical boundaries the lattice is periodic in the
//! first extent: the `d` bond of row L1 connects back to the `u` bond of
//! row 1, so columns are rings of circumference L1 and the second extent is
//! the open direction.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{contract, Axis, Tensor};

/// Boundary condition of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    /// Periodic in the first lattice extent (rows wrap; columns are rings).
    Cylinder,
}

/// Lattice site, 1-based (row, col).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub row: usize,
    pub col: usize,
}

impl Site {
    pub fn new(row: usize, col: usize) -> Self {
        Site { row, col }
    }
}

/// A 2x2 plaquette identified by its top-left anchor site.
///
/// Its four sites in clockwise order are top-left, top-right, bottom-right,
/// bottom-left; the bottom row wraps under cylindrical boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Plaquette {
    pub row: usize,
    pub col: usize,
}

/// A virtual bond between two adjacent sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bond {
    /// Horizontal bond between (row, col) and (row, col + 1).
    H { row: usize, col: usize },
    /// Vertical bond between (row, col) and (row + 1, col); under
    /// cylindrical boundaries row L1 connects back to row 1.
    V { row: usize, col: usize },
}

/// Projected entangled pair state on an L1 x L2 square lattice.
#[derive(Clone, Debug)]
pub struct Peps {
    l1: usize,
    l2: usize,
    bc: Boundary,
    phys_dim: usize,
    tensors: Vec<Tensor>,
}

impl Peps {
    pub fn l1(&self) -> usize {
        self.l1
    }

    pub fn l2(&self) -> usize {
        self.l2
    }

    pub fn bc(&self) -> Boundary {
        self.bc
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn n_sites(&self) -> usize {
        self.l1 * self.l2
    }

    fn index(&self, site: Site) -> usize {
        (site.row - 1) * self.l2 + (site.col - 1)
    }

    pub fn site_in_range(&self, site: Site) -> bool {
        site.row >= 1 && site.row <= self.l1 && site.col >= 1 && site.col <= self.l2
    }

    pub fn check_site(&self, site: Site) -> Result<()> {
        if self.site_in_range(site) {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange((site.row, site.col), self.l1, self.l2))
        }
    }

    pub fn tensor(&self, site: Site) -> &Tensor {
        &self.tensors[self.index(site)]
    }

    pub fn set_tensor(&mut self, site: Site, t: Tensor) -> Result<()> {
        self.check_site(site)?;
        let old = &self.tensors[self.index(site)];
        for (a, b) in old.axes().iter().zip(t.axes().iter()) {
            if a.label != b.label {
                return Err(Error::LabelSetMismatch(format!(
                    "site tensor axes must stay (l, r, u, d, s); got `{}`",
                    b.label
                )));
            }
        }
        let idx = self.index(site);
        self.tensors[idx] = t;
        Ok(())
    }

    /// Row below `row`, wrapping under cylindrical boundaries.
    pub fn row_below(&self, row: usize) -> Option<usize> {
        if row < self.l1 {
            Some(row + 1)
        } else if self.bc == Boundary::Cylinder {
            Some(1)
        } else {
            None
        }
    }

    /// Row above `row`, wrapping under cylindrical boundaries.
    pub fn row_above(&self, row: usize) -> Option<usize> {
        if row > 1 {
            Some(row - 1)
        } else if self.bc == Boundary::Cylinder {
            Some(self.l1)
        } else {
            None
        }
    }

    /// The four sites of a plaquette in clockwise order (TL, TR, BR, BL).
    pub fn plaquette_sites(&self, p: Plaquette) -> Result<[Site; 4]> {
        let below = self.row_below(p.row).ok_or_else(|| {
            Error::InvalidInput(format!("plaquette row {} has no row below", p.row))
        })?;
        if p.col + 1 > self.l2 {
            return Err(Error::InvalidInput(format!(
                "plaquette col {} has no col to the right",
                p.col
            )));
        }
        let sites = [
            Site::new(p.row, p.col),
            Site::new(p.row, p.col + 1),
            Site::new(below, p.col + 1),
            Site::new(below, p.col),
        ];
        for s in &sites {
            self.check_site(*s)?;
        }
        Ok(sites)
    }

    /// All plaquette anchors, row-major.
    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let rows = match self.bc {
            Boundary::Open => self.l1 - 1,
            Boundary::Cylinder => self.l1,
        };
        let mut out = Vec::new();
        for row in 1..=rows {
            for col in 1..self.l2 {
                out.push(Plaquette { row, col });
            }
        }
        out
    }

    /// Dimension of the horizontal bond between (row, col) and (row, col+1).
    pub fn bond_dim_h(&self, row: usize, col: usize) -> usize {
        self.tensor(Site::new(row, col)).axes()[1].dim
    }

    /// Dimension of the vertical bond between (row, col) and the row below.
    pub fn bond_dim_v(&self, row: usize, col: usize) -> usize {
        self.tensor(Site::new(row, col)).axes()[3].dim
    }

    /// All bonds, horizontal row-major then vertical row-major.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::new();
        for row in 1..=self.l1 {
            for col in 1..self.l2 {
                out.push(Bond::H { row, col });
            }
        }
        let vrows = match self.bc {
            Boundary::Open => self.l1 - 1,
            Boundary::Cylinder => self.l1,
        };
        for row in 1..=vrows {
            for col in 1..=self.l2 {
                out.push(Bond::V { row, col });
            }
        }
        out
    }

    /// The two sites joined by a bond, in (left/upper, right/lower) order.
    pub fn bond_sites(&self, bond: Bond) -> Result<(Site, Site)> {
        match bond {
            Bond::H { row, col } => {
                let a = Site::new(row, col);
                let b = Site::new(row, col + 1);
                self.check_site(a)?;
                self.check_site(b)?;
                Ok((a, b))
            }
            Bond::V { row, col } => {
                let a = Site::new(row, col);
                let below = self
                    .row_below(row)
                    .ok_or_else(|| Error::InvalidInput(format!("no vertical bond at row {row}")))?;
                let b = Site::new(below, col);
                self.check_site(a)?;
                Ok((a, b))
            }
        }
    }

    fn expected_axes(
        l1: usize,
        l2: usize,
        bc: Boundary,
        d: usize,
        bond: impl Fn(Bond) -> usize,
        site: Site,
    ) -> Vec<Axis> {
        let (i, j) = (site.row, site.col);
        let ld = if j > 1 {
            bond(Bond::H { row: i, col: j - 1 })
        } else {
            1
        };
        let rd = if j < l2 { bond(Bond::H { row: i, col: j }) } else { 1 };
        let ud = if i > 1 {
            bond(Bond::V { row: i - 1, col: j })
        } else if bc == Boundary::Cylinder {
            bond(Bond::V { row: l1, col: j })
        } else {
            1
        };
        let dd = if i < l1 || bc == Boundary::Cylinder {
            bond(Bond::V { row: i, col: j })
        } else {
            1
        };
        vec![
            Axis::new("l", ld),
            Axis::new("r", rd),
            Axis::new("u", ud),
            Axis::new("d", dd),
            Axis::new("s", d),
        ]
    }

    /// Consistency of the whole grid: axis order, shared bond dims, finite
    /// and not identically zero tensors.
    pub fn validate(&self) -> Result<()> {
        for i in 1..=self.l1 {
            for j in 1..=self.l2 {
                let site = Site::new(i, j);
                let t = self.tensor(site);
                let want = Self::expected_axes(
                    self.l1,
                    self.l2,
                    self.bc,
                    self.phys_dim,
                    |b| match b {
                        Bond::H { row, col } => self.bond_dim_h(row, col),
                        Bond::V { row, col } => self.bond_dim_v(row, col),
                    },
                    site,
                );
                if t.axes() != want.as_slice() {
                    return Err(Error::LabelSetMismatch(format!(
                        "site ({i},{j}) axes {:?} do not match grid {:?}",
                        t.axes(),
                        want
                    )));
                }
                if t.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "site ({i},{j}) has non-finite entries"
                    )));
                }
                if t.norm2() == 0.0 {
                    return Err(Error::ZeroNorm(format!(
                        "site ({i},{j}) is identically zero"
                    )));
                }
                if j < self.l2 {
                    let rd = t.axes()[1].dim;
                    let nb = self.tensor(Site::new(i, j + 1)).axes()[0].dim;
                    if rd != nb {
                        return Err(Error::DimMismatch {
                            a_label: format!("r@({i},{j})"),
                            a_dim: rd,
                            b_label: format!("l@({i},{})", j + 1),
                            b_dim: nb,
                        });
                    }
                }
                if let Some(below) = self.row_below(i) {
                    let dd = t.axes()[3].dim;
                    let nb = self.tensor(Site::new(below, j)).axes()[2].dim;
                    if dd != nb {
                        return Err(Error::DimMismatch {
                            a_label: format!("d@({i},{j})"),
                            a_dim: dd,
                            b_label: format!("u@({below},{j})"),
                            b_dim: nb,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Random PEPS: i.i.d. complex-Gaussian entries, every site tensor
    /// scaled to unit 2-norm; bit-reproducible per seed.
    pub fn random_init(
        l1: usize,
        l2: usize,
        bc: Boundary,
        d: usize,
        bond_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        if l1 < 1 || l2 < 1 {
            return Err(Error::InvalidInput("lattice extents must be positive".into()));
        }
        if bc == Boundary::Cylinder && l1 < 2 {
            return Err(Error::InvalidInput("cylinder needs circumference >= 2".into()));
        }
        if bond_dim < 1 || d < 2 {
            return Err(Error::InvalidInput("need D >= 1 and d >= 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tensors = Vec::with_capacity(l1 * l2);
        for i in 1..=l1 {
            for j in 1..=l2 {
                let axes = Self::expected_axes(l1, l2, bc, d, |_| bond_dim, Site::new(i, j));
                let len: usize = axes.iter().map(|a| a.dim).product();
                let mut data = Vec::with_capacity(len);
                for _ in 0..len {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    data.push(C64::new(re, im));
                }
                let t = Tensor::new(axes, data)?;
                let n = t.norm2();
                if n == 0.0 {
                    return Err(Error::ZeroNorm("random init drew a zero tensor".into()));
                }
                tensors.push(t.scale(C64::new(1.0 / n, 0.0)));
            }
        }
        let peps = Peps {
            l1,
            l2,
            bc,
            phys_dim: d,
            tensors,
        };
        peps.validate()?;
        Ok(peps)
    }

    /// D = 1 product state whose state vector is the tensor product of
    /// `local_state` over all sites.
    pub fn product_init(l1: usize, l2: usize, bc: Boundary, local_state: &[C64]) -> Result<Self> {
        let d = local_state.len();
        if d < 2 {
            return Err(Error::InvalidInput("physical dimension must be >= 2".into()));
        }
        let norm: f64 = local_state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm("product_init needs a nonzero local state".into()));
        }
        let mut tensors = Vec::with_capacity(l1 * l2);
        for i in 1..=l1 {
            for j in 1..=l2 {
                let axes = Self::expected_axes(l1, l2, bc, d, |_| 1, Site::new(i, j));
                let data: Vec<C64> = local_state.iter().map(|z| z / norm).collect();
                tensors.push(Tensor::new(axes, data)?);
            }
        }
        let peps = Peps {
            l1,
            l2,
            bc,
            phys_dim: d,
            tensors,
        };
        peps.validate()?;
        Ok(peps)
    }

    /// Exact contraction of the network into a rank-1 state vector.
    ///
    /// Basis ordering is row-major by site with the first site most
    /// significant: amplitude index I = sum over sites n = 1..N (row-major)
    /// of s_n * d^(N-n).
    pub fn to_statevector(&self) -> Result<Tensor> {
        let n_sites = self.n_sites();
        let dim_total = (self.phys_dim as f64).powi(n_sites as i32);
        if dim_total > (1u64 << 20) as f64 {
            return Err(Error::SizeGuard(format!(
                "state vector dimension d^{n_sites} exceeds 2^20"
            )));
        }
        let mut acc = Tensor::scalar(C64::new(1.0, 0.0));
        for i in 1..=self.l1 {
            for j in 1..=self.l2 {
                let mut t = self.tensor(Site::new(i, j)).clone();
                let mut pairs: Vec<(String, String)> = Vec::new();
                if j > 1 {
                    let lab = format!("#r{}_{}", i, j - 1);
                    t = t.rename("l", lab.clone())?;
                    pairs.push((lab.clone(), lab));
                } else {
                    t = squeeze(t, "l")?;
                }
                if i > 1 {
                    let lab = format!("#d{}_{}", i - 1, j);
                    t = t.rename("u", lab.clone())?;
                    pairs.push((lab.clone(), lab));
                } else if self.bc == Boundary::Cylinder {
                    t = t.rename("u", format!("#w{j}"))?;
                } else {
                    t = squeeze(t, "u")?;
                }
                if self.bc == Boundary::Cylinder && i == self.l1 {
                    t = t.rename("d", format!("#wd{j}"))?;
                    pairs.push((format!("#w{j}"), format!("#wd{j}")));
                } else if i < self.l1 {
                    t = t.rename("d", format!("#d{}_{}", i, j))?;
                } else {
                    t = squeeze(t, "d")?;
                }
                if j < self.l2 {
                    t = t.rename("r", format!("#r{}_{}", i, j))?;
                } else {
                    t = squeeze(t, "r")?;
                }
                t = t.rename("s", format!("#s{i}_{j}"))?;
                let pair_refs: Vec<(&str, &str)> =
                    pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
                acc = contract(&acc, &t, &pair_refs)?;
            }
        }
        let order: Vec<String> = (1..=self.l1)
            .flat_map(|i| (1..=self.l2).map(move |j| format!("#s{i}_{j}")))
            .collect();
        let order_refs: Vec<&str> = order.iter().map(|s| s.as_str()).collect();
        let flat = acc.permuted(&order_refs)?;
        Tensor::new(vec![Axis::new("psi", flat.len())], flat.data().to_vec())
    }

    /// Insert a gauge pair on a bond: `g` (axes `i`, `o`) is absorbed into
    /// the left/upper tensor's outgoing leg and `g_inv` into the
    /// right/lower tensor's incoming leg. With g_inv = g^-1 the physical
    /// state is unchanged.
    pub fn insert_gauge_pair(&mut self, bond: Bond, g: &Tensor, g_inv: &Tensor) -> Result<()> {
        let (a, b) = self.bond_sites(bond)?;
        let (out_leg, in_leg) = match bond {
            Bond::H { .. } => ("r", "l"),
            Bond::V { .. } => ("d", "u"),
        };
        let ta = self.tensor(a).clone();
        let tb = self.tensor(b).clone();
        let ga = contract(&ta, g, &[(out_leg, "i")])?.rename("o", out_leg)?;
        let gb = contract(g_inv, &tb, &[("o", in_leg)])?.rename("i", in_leg)?;
        let order = ["l", "r", "u", "d", "s"];
        self.set_tensor(a, ga.permuted(&order)?)?;
        self.set_tensor(b, gb.permuted(&order)?)?;
        Ok(())
    }

    /// Product of all site-tensor 2-norms.
    pub fn tensor_norm_product(&self) -> f64 {
        self.tensors.iter().map(|t| t.norm2()).product()
    }

    /// Rescale every site tensor to unit 2-norm (pure scale gauge).
    pub fn normalize_tensors(&mut self) {
        for t in &mut self.tensors {
            let n = t.norm2();
            if n > 0.0 {
                *t = t.scale(C64::new(1.0 / n, 0.0));
            }
        }
    }

    // ------------------------------------------------------------------
    // Archive format: magic "RPEPS\x01"; header l1, l2, bc, d (LE u32);
    // per-edge bond dims (row bonds then column bonds, row-major, LE u32);
    // payload of site tensors row-major as (re, im) LE f64 pairs; trailing
    // CRC-32 of the payload.
    // ------------------------------------------------------------------

    const MAGIC: &'static [u8; 6] = b"RPEPS\x01";

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(Self::MAGIC);
        let bc_code: u32 = match self.bc {
            Boundary::Open => 0,
            Boundary::Cylinder => 1,
        };
        for v in [self.l1 as u32, self.l2 as u32, bc_code, self.phys_dim as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for row in 1..=self.l1 {
            for col in 1..self.l2 {
                out.extend_from_slice(&(self.bond_dim_h(row, col) as u32).to_le_bytes());
            }
        }
        let vrows = match self.bc {
            Boundary::Open => self.l1 - 1,
            Boundary::Cylinder => self.l1,
        };
        for row in 1..=vrows {
            for col in 1..=self.l2 {
                out.extend_from_slice(&(self.bond_dim_v(row, col) as u32).to_le_bytes());
            }
        }
        let mut payload = Vec::new();
        for t in &self.tensors {
            for z in t.data() {
                payload.extend_from_slice(&z.re.to_le_bytes());
                payload.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        let crc = crc32(&payload);
        out.extend_from_slice(&payload);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = bytes;
        let mut take = |n: usize| -> Result<&[u8]> {
            if cur.len() < n {
                return Err(Error::Format("truncated archive".into()));
            }
            let (head, tail) = cur.split_at(n);
            cur = tail;
            Ok(head)
        };
        let magic = take(6)?;
        if magic != Self::MAGIC {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let mut header = [0u32; 4];
        for h in header.iter_mut() {
            let b = take(4)?;
            *h = u32::from_le_bytes([b[0], b[1], b[2], b[3]]);
        }
        let (l1, l2, bc_code, d) = (
            header[0] as usize,
            header[1] as usize,
            header[2],
            header[3] as usize,
        );
        let bc = match bc_code {
            0 => Boundary::Open,
            1 => Boundary::Cylinder,
            c => return Err(Error::Format(format!("unknown boundary code {c}"))),
        };
        if l1 == 0 || l2 == 0 || d == 0 {
            return Err(Error::Format("zero extent in header".into()));
        }
        let mut hdims = vec![vec![0usize; l2.saturating_sub(1)]; l1];
        for row in 0..l1 {
            for col in 0..l2 - 1 {
                let b = take(4)?;
                hdims[row][col] = u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize;
            }
        }
        let vrows = match bc {
            Boundary::Open => l1 - 1,
            Boundary::Cylinder => l1,
        };
        let mut vdims = vec![vec![0usize; l2]; vrows];
        for row in 0..vrows {
            for col in 0..l2 {
                let b = take(4)?;
                vdims[row][col] = u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize;
            }
        }
        let bond = |b: Bond| -> usize {
            match b {
                Bond::H { row, col } => hdims[row - 1][col - 1],
                Bond::V { row, col } => vdims[row - 1][col - 1],
            }
        };
        let mut payload_len = 0usize;
        let mut shapes = Vec::with_capacity(l1 * l2);
        for i in 1..=l1 {
            for j in 1..=l2 {
                let axes = Self::expected_axes(l1, l2, bc, d, &bond, Site::new(i, j));
                let len: usize = axes.iter().map(|a| a.dim).product();
                payload_len += len;
                shapes.push(axes);
            }
        }
        let payload = take(payload_len * 16)?;
        let crc_bytes = take(4)?;
        let want_crc =
            u32::from_le_bytes([crc_bytes[0], crc_bytes[1], crc_bytes[2], crc_bytes[3]]);
        if !cur.is_empty() {
            return Err(Error::Format("trailing bytes after checksum".into()));
        }
        if crc32(payload) != want_crc {
            return Err(Error::Format("payload checksum mismatch".into()));
        }
        let mut tensors = Vec::with_capacity(l1 * l2);
        let mut off = 0usize;
        for axes in shapes {
            let len: usize = axes.iter().map(|a| a.dim).product();
            let mut data = Vec::with_capacity(len);
            for k in 0..len {
                let base = (off + k) * 16;
                let re = f64::from_le_bytes(payload[base..base + 8].try_into().unwrap());
                let im = f64::from_le_bytes(payload[base + 8..base + 16].try_into().unwrap());
                data.push(C64::new(re, im));
            }
            off += len;
            tensors.push(Tensor::new(axes, data).map_err(|e| Error::Format(e.to_string()))?);
        }
        let peps = Peps {
            l1,
            l2,
            bc,
            phys_dim: d,
            tensors,
        };
        peps.validate()?;
        Ok(peps)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        let mut bytes = Vec::new();
        f.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

/// Remove a dimension-1 axis.
pub(crate) fn squeeze(t: Tensor, label: &str) -> Result<Tensor> {
    let pos = t.axis_pos(label)?;
    if t.axes()[pos].dim != 1 {
        return Err(Error::InvalidInput(format!(
            "cannot squeeze axis `{label}` of dim {}",
            t.axes()[pos].dim
        )));
    }
    let axes: Vec<Axis> = t
        .axes()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, a)| a.clone())
        .collect();
    Tensor::new(axes, t.data().to_vec())
}

/// IEEE CRC-32 (reflected, polynomial 0xEDB88320).
pub(crate) fn crc32(bytes: &[u8]) -> u32 {
    let mut crc: u32 = 0xFFFF_FFFF;
    for &b in bytes {
        crc ^= u32::from(b);
        for _ in 0..8 {
            let mask = (crc & 1).wrapping_neg();
            crc = (crc >> 1) ^ (0xEDB8_8320 & mask);
        }
    }
    !crc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_init_is_deterministic_and_unit_norm() {
        let a = Peps::random_init(3, 3, Boundary::Open, 2, 2, 42).unwrap();
        let b = Peps::random_init(3, 3, Boundary::Open, 2, 2, 42).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                let s = Site::new(i, j);
                assert_eq!(a.tensor(s).data(), b.tensor(s).data());
                assert!((a.tensor(s).norm2() - 1.0).abs() < 1e-14);
            }
        }
        let c = Peps::random_init(3, 3, Boundary::Open, 2, 2, 43).unwrap();
        assert_ne!(
            a.tensor(Site::new(1, 1)).data(),
            c.tensor(Site::new(1, 1)).data()
        );
    }

    #[test]
    fn product_state_vector_has_single_amplitude() {
        let up = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let p = Peps::product_init(2, 3, Boundary::Open, &up).unwrap();
        let sv = p.to_statevector().unwrap();
        assert_eq!(sv.len(), 64);
        assert!((sv.data()[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(sv.data()[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn product_round_trips_local_state() {
        let local = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let p = Peps::product_init(2, 2, Boundary::Open, &local).unwrap();
        let sv = p.to_statevector().unwrap();
        for idx in 0..16usize {
            let bits = [(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let want: C64 = bits.iter().map(|&b| local[b]).product();
            assert!((sv.data()[idx] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn statevector_norm_positive_for_random_states() {
        for seed in 0..20 {
            let p = Peps::random_init(3, 3, Boundary::Open, 2, 2, seed).unwrap();
            let sv = p.to_statevector().unwrap();
            assert!(sv.norm2() > 0.0, "seed {seed}");
        }
    }

    #[test]
    fn cylinder_statevector_traces_wrap_bonds() {
        let p = Peps::random_init(2, 2, Boundary::Cylinder, 2, 2, 7).unwrap();
        let sv = p.to_statevector().unwrap();
        assert_eq!(sv.len(), 16);
        assert!(sv.norm2() > 0.0);
    }

    #[test]
    fn gauge_pair_leaves_statevector_unchanged() {
        let mut p = Peps::random_init(3, 3, Boundary::Open, 2, 2, 5).unwrap();
        let before = p.to_statevector().unwrap();
        let g = Tensor::new(
            vec![Axis::new("i", 2), Axis::new("o", 2)],
            vec![
                C64::new(2.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
            ],
        )
        .unwrap();
        let g_inv = Tensor::new(
            vec![Axis::new("i", 2), Axis::new("o", 2)],
            vec![
                C64::new(0.5, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(2.0, 0.0),
            ],
        )
        .unwrap();
        p.insert_gauge_pair(Bond::H { row: 2, col: 1 }, &g, &g_inv).unwrap();
        p.insert_gauge_pair(Bond::V { row: 1, col: 3 }, &g, &g_inv).unwrap();
        let after = p.to_statevector().unwrap();
        let diff: f64 = before
            .data()
            .iter()
            .zip(after.data().iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10 * before.norm2());
    }

    #[test]
    fn archive_round_trip_bit_exact() {
        let p = Peps::random_init(4, 4, Boundary::Open, 2, 3, 9).unwrap();
        let bytes = p.to_bytes();
        let q = Peps::from_bytes(&bytes).unwrap();
        assert_eq!(p.l1(), q.l1());
        assert_eq!(p.bc(), q.bc());
        for i in 1..=4 {
            for j in 1..=4 {
                let s = Site::new(i, j);
                assert_eq!(p.tensor(s).data(), q.tensor(s).data());
            }
        }
        assert_eq!(bytes, q.to_bytes());
    }

    #[test]
    fn archive_rejects_corruption() {
        let p = Peps::random_init(2, 2, Boundary::Open, 2, 2, 1).unwrap();
        let mut bytes = p.to_bytes();
        bytes[0] = b'X';
        assert!(matches!(Peps::from_bytes(&bytes), Err(Error::Format(_))));

        let mut bytes = p.to_bytes();
        let n = bytes.len();
        bytes[n - 10] ^= 0xFF;
        assert!(matches!(Peps::from_bytes(&bytes), Err(Error::Format(_))));

        let bytes = p.to_bytes();
        assert!(matches!(
            Peps::from_bytes(&bytes[..n - 7]),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn archive_preserves_cylinder_wrap() {
        let p = Peps::random_init(4, 3, Boundary::Cylinder, 2, 2, 3).unwrap();
        let q = Peps::from_bytes(&p.to_bytes()).unwrap();
        assert_eq!(q.bc(), Boundary::Cylinder);
        assert_eq!(q.bond_dim_v(4, 1), 2);
        assert_eq!(
            p.tensor(Site::new(4, 2)).data(),
            q.tensor(Site::new(4, 2)).data()
        );
    }

    #[test]
    fn save_load_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.rpeps");
        let p = Peps::random_init(3, 2, Boundary::Cylinder, 2, 2, 11).unwrap();
        p.save(&path).unwrap();
        let q = Peps::load(&path).unwrap();
        assert_eq!(p.to_bytes(), q.to_bytes());
    }

    #[test]
    fn cylinder_shift_symmetry_of_translation_invariant_state() {
        let base = Peps::random_init(3, 2, Boundary::Cylinder, 2, 2, 21).unwrap();
        let shared = base.tensor(Site::new(1, 1)).clone();
        let mut p = base.clone();
        for i in 1..=3 {
            for j in 1..=2 {
                let want_axes = p.tensor(Site::new(i, j)).axes().to_vec();
                let t = Tensor::new(want_axes, shared.data().to_vec()).unwrap();
                p.set_tensor(Site::new(i, j), t).unwrap();
            }
        }
        let norm_a = p.to_statevector().unwrap().norm2();
        let mut shifted = p.clone();
        for i in 1..=3 {
            for j in 1..=2 {
                let src = Site::new(if i == 3 { 1 } else { i + 1 }, j);
                let t = p.tensor(src).clone();
                shifted.set_tensor(Site::new(i, j), t).unwrap();
            }
        }
        let norm_b = shifted.to_statevector().unwrap().norm2();
        assert!((norm_a - norm_b).abs() < 1e-12 * norm_a);
    }

    #[test]
    fn plaquette_sites_clockwise_with_wrap() {
        let p = Peps::random_init(3, 3, Boundary::Cylinder, 2, 2, 1).unwrap();
        let sites = p.plaquette_sites(Plaquette { row: 3, col: 1 }).unwrap();
        assert_eq!(
            sites,
            [
                Site::new(3, 1),
                Site::new(3, 2),
                Site::new(1, 2),
                Site::new(1, 1)
            ]
        );
        let q = Peps::random_init(3, 3, Boundary::Open, 2, 2, 1).unwrap();
        assert!(q.plaquette_sites(Plaquette { row: 3, col: 1 }).is_err());
    }

    #[test]
    fn statevector_guard_rejects_huge_lattices() {
        let p = Peps::random_init(5, 4, Boundary::Open, 2, 1, 2).unwrap();
        assert!(p.to_statevector().is_ok());
        let q = Peps::random_init(5, 6, Boundary::Open, 2, 1, 2).unwrap();
        assert!(matches!(q.to_statevector(), Err(Error::SizeGuard(_))));
    }
}
