use std::fmt;
use std::str::FromStr;

use super::ElementError;

/// Canonical solution-point (or centre) layouts on the reference element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Legendre,
    Lobatto,
    Chebyshev,
    UniformFull,
    UniformInternal,
    /// User-supplied coordinates; never produced by [`node_set`].
    Custom,
}

impl NodeKind {
    pub const ALL: [NodeKind; 5] =
        [NodeKind::Legendre, NodeKind::Lobatto, NodeKind::Chebyshev, NodeKind::UniformFull, NodeKind::UniformInternal];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Legendre => "legendre",
            NodeKind::Lobatto => "lobatto",
            NodeKind::Chebyshev => "chebyshev",
            NodeKind::UniformFull => "uniform_full",
            NodeKind::UniformInternal => "uniform_internal",
            NodeKind::Custom => "custom",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeKind {
    type Err = ElementError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| ElementError::UnknownNodeKind(s.to_string()))
    }
}

/// Strictly increasing reference coordinates in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    kind: NodeKind,
    coords: Vec<f64>,
}

impl NodeSet {
    /// Any strictly increasing coordinates in `[-1, 1]`.
    pub fn custom(coords: Vec<f64>) -> Result<Self, ElementError> {
        let inside = coords.iter().all(|x| (-1.0..=1.0).contains(x));
        let increasing = coords.windows(2).all(|w| w[0] < w[1]);
        if coords.is_empty() || !inside || !increasing {
            return Err(ElementError::InvalidCoordinates);
        }
        Ok(Self { kind: NodeKind::Custom, coords })
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

pub const MIN_NODES: usize = 2;
pub const MAX_NODES: usize = 10;

pub fn node_set(kind: NodeKind, n: usize) -> Result<NodeSet, ElementError> {
    if !(MIN_NODES..=MAX_NODES).contains(&n) {
        return Err(ElementError::NodeCount { n, min: MIN_NODES, max: MAX_NODES });
    }
    let coords = match kind {
        NodeKind::Legendre => legendre_roots(n),
        NodeKind::Lobatto => {
            let mut c = vec![-1.0];
            c.extend(legendre_derivative_roots(n - 1));
            c.push(1.0);
            c
        }
        NodeKind::Chebyshev => symmetric(n, |i| -((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos()),
        NodeKind::UniformFull => symmetric(n, |i| -1.0 + 2.0 * i as f64 / (n - 1) as f64),
        NodeKind::UniformInternal => symmetric(n, |i| -1.0 + (2 * i + 1) as f64 / n as f64),
        NodeKind::Custom => return Err(ElementError::UnknownNodeKind("custom".into())),
    };
    Ok(NodeSet { kind, coords })
}

/// Builds the left half from `f` and mirrors it, so the set is exactly
/// symmetric and the middle node of an odd set is exactly zero.
fn symmetric(n: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut c = vec![0.0; n];
    for i in 0..n / 2 {
        c[i] = f(i);
        c[n - 1 - i] = -c[i];
    }
    c
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        x.powi(n as i32 + 1) * nf * (nf + 1.0) / 2.0
    } else {
        nf * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

/// Roots of `P_n`, ascending.
pub fn legendre_roots(n: usize) -> Vec<f64> {
    symmetric(n, |i| {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        x
    })
}

/// Roots of `P_m'`, ascending (the interior Gauss–Lobatto nodes for `m + 1` points).
fn legendre_derivative_roots(m: usize) -> Vec<f64> {
    let count = m.saturating_sub(1);
    symmetric(count, |i| {
        let mut x = -(std::f64::consts::PI * (i + 1) as f64 / m as f64).cos();
        let mf = m as f64;
        for _ in 0..100 {
            let (p, dp) = legendre_eval(m, x);
            // (1 - x²) P'' = 2x P' - m(m+1) P
            let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        x
    })
}

pub const MAX_QUADRATURE_ORDER: usize = 200;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn quadrature(order: usize) -> Result<(Vec<f64>, Vec<f64>), ElementError> {
    if !(1..=MAX_QUADRATURE_ORDER).contains(&order) {
        return Err(ElementError::QuadratureOrder { order, max: MAX_QUADRATURE_ORDER });
    }
    let nodes = legendre_roots(order);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = legendre_eval(order, x);
            2.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    Ok((nodes, weights))
}
