//! Deciding quasilinearity by searching for a modification tower, and replaying the
//! resulting certificates independently of the search.
//!
//! The search only tries rays of the fan as vertical directions. In a nondegenerate
//! modification the vertical ray is a ray of the fan and isomorphisms carry rays to
//! rays, while degenerate steps are linear re-embeddings absorbed by restricting to
//! the lattice spanned by the fan. That this covers every tower allowed "up to
//! isomorphism" is the central assumption of the module: a fan that the search rejects
//! but that is quasilinear by other means is a bug in the search.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{is_zero_vector, solve_integer, IntMatrix, LatticeBasis, Vector};
use crate::format::{deserialize_bigints, deserialize_vectors, serialize_bigints, serialize_vectors};
use crate::modification::{modify, recognize_along, ModificationWitness};
use crate::plfun::PLFunction;
use crate::polyfan::{is_complete, map_fan, restrict_to_minimal_lattice, Fan};
use crate::tropcycle::{check_balancing, irreducibility, local_profile, same_cycle, WeightedFan};

pub const DEFAULT_BUDGET: u64 = 20_000;

/// A weighted fan written out with string integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanData {
    pub ambient_rank: usize,
    #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors")]
    pub rays: Vec<Vector>,
    /// Maximal cones as ray index lists.
    pub cones: Vec<Vec<usize>>,
    /// Weight of each entry of `cones`.
    #[serde(serialize_with = "serialize_bigints", deserialize_with = "deserialize_bigints")]
    pub weights: Vec<BigInt>,
}

impl FanData {
    pub fn of(wf: &WeightedFan) -> Self {
        let f = wf.fan();
        let maximal = f.maximal_cones();
        FanData {
            ambient_rank: f.ambient_rank(),
            rays: f.rays().to_vec(),
            cones: maximal.iter().map(|&c| f.cone(c).rays().to_vec()).collect(),
            weights: maximal.iter().map(|&c| wf.weight(c).clone()).collect(),
        }
    }

    /// Validates the data as a weighted fan with positive weights.
    pub fn build(&self) -> Result<WeightedFan> {
        if self.cones.len() != self.weights.len() {
            return Err(Error::WeightsMismatch);
        }
        let fan = Fan::new(self.ambient_rank, self.rays.clone(), self.cones.clone())?;
        let mut weights = BTreeMap::new();
        for (c, w) in self.cones.iter().zip(&self.weights) {
            let mut rays = c.clone();
            rays.sort_unstable();
            let idx = fan.index_of(&rays).ok_or_else(|| Error::ConeNotInFan(c.clone()))?;
            weights.insert(idx, w.clone());
        }
        WeightedFan::new(fan, weights)
    }
}

fn rows_of(m: &IntMatrix) -> Vec<Vector> {
    m.row_vectors()
}

fn matrix_of(rows: &[Vector], cols: usize) -> Result<IntMatrix> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::MalformedCertificate("ragged matrix".into()));
    }
    Ok(IntMatrix::from_rows(rows, cols))
}

/// A modification tower certifying quasilinearity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case", deny_unknown_fields)]
pub enum Certificate {
    /// The fan is complete in `ℤ^rank` with all weights one.
    Complete { rank: usize },
    /// The fan lives in the saturated lattice with this basis; `inner` certifies it in
    /// the coordinates of that basis.
    Restrict {
        #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors")]
        basis: Vec<Vector>,
        inner: Box<Certificate>,
    },
    /// `inner` certifies the image of the fan under this unimodular matrix.
    Isomorphic {
        #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors")]
        matrix: Vec<Vector>,
        inner: Box<Certificate>,
    },
    /// After `change` (which sends ray `direction` to the last basis vector) the fan is
    /// the modification of `base` along `div(φ)`, with `φ` given by its values on the
    /// base rays.
    Modification {
        direction: usize,
        #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors")]
        change: Vec<Vector>,
        base: FanData,
        #[serde(serialize_with = "serialize_bigints", deserialize_with = "deserialize_bigints")]
        phi: Vec<BigInt>,
        divisor: Option<FanData>,
        base_certificate: Box<Certificate>,
        divisor_certificate: Option<Box<Certificate>>,
    },
}

impl Certificate {
    /// Number of modification steps along the longest branch.
    pub fn depth(&self) -> usize {
        match self {
            Certificate::Complete { .. } => 0,
            Certificate::Restrict { inner, .. } | Certificate::Isomorphic { inner, .. } => inner.depth(),
            Certificate::Modification { base_certificate, divisor_certificate, .. } => {
                1 + base_certificate.depth().max(divisor_certificate.as_ref().map_or(0, |d| d.depth()))
            }
        }
    }

    /// The first modification step below any restrictions.
    pub fn first_modification(&self) -> Option<&Certificate> {
        match self {
            Certificate::Complete { .. } => None,
            Certificate::Restrict { inner, .. } | Certificate::Isomorphic { inner, .. } => inner.first_modification(),
            m @ Certificate::Modification { .. } => Some(m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Quasilinear { certificate: Certificate },
    NotQuasilinear { reason: String, trace: Vec<String> },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Quasilinear { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn is_quasilinear(&self) -> bool {
        self.certificate().is_some()
    }
}

enum Outcome {
    Accept(Certificate),
    Reject(String, Vec<String>),
    OutOfBudget,
}

pub fn recognize(wf: &WeightedFan) -> Verdict {
    recognize_with_budget(wf, DEFAULT_BUDGET)
}

/// Depth-first search over rays in index order; each attempted modification costs one
/// unit of `budget`, and running out gives an inconclusive verdict.
pub fn recognize_with_budget(wf: &WeightedFan, budget: u64) -> Verdict {
    let mut search = Search { budget, used: 0 };
    match search.run(wf) {
        Outcome::Accept(certificate) => Verdict::Quasilinear { certificate },
        Outcome::Reject(reason, trace) => Verdict::NotQuasilinear { reason, trace },
        Outcome::OutOfBudget => Verdict::Inconclusive { reason: format!("search budget of {budget} exhausted") },
    }
}

/// Necessary conditions checked before searching: balanced, reduced, irreducible and
/// locally irreducible. Returns the first failure.
pub fn quick_rejection(wf: &WeightedFan) -> Option<String> {
    if wf.is_signed() && wf.weights().values().any(|w| !w.is_positive()) {
        return Some("weights are not positive".into());
    }
    if !check_balancing(wf).balanced {
        return Some("not balanced".into());
    }
    if !wf.is_reduced() {
        return Some("not reduced".into());
    }
    match irreducibility(wf) {
        Ok(irr) if irr.rank != 1 => return Some(format!("not irreducible: M{} has rank {}", wf.dim(), irr.rank)),
        Err(e) => return Some(format!("irreducibility check failed: {e}")),
        _ => {}
    }
    match local_profile(wf) {
        Ok(p) => p.stars.iter().find(|s| !s.irreducible).map(|s| {
            format!("not locally irreducible: star at cone {:?} has rank {}", wf.fan().cone(s.cone).rays(), s.rank)
        }),
        Err(e) => Some(format!("local check failed: {e}")),
    }
}

struct Search {
    budget: u64,
    used: u64,
}

impl Search {
    fn run(&mut self, wf: &WeightedFan) -> Outcome {
        if let Some(reason) = quick_rejection(wf) {
            return Outcome::Reject(reason, vec![]);
        }
        let f = wf.fan();
        let (restricted, chart) = restrict_to_minimal_lattice(f);
        if restricted.ambient_rank() < f.ambient_rank() {
            let inner_fan = wf.with_fan(restricted).expect("same cones");
            return match self.run(&inner_fan) {
                Outcome::Accept(inner) => Outcome::Accept(Certificate::Restrict {
                    basis: chart.basis.vectors().to_vec(),
                    inner: Box::new(inner),
                }),
                other => other,
            };
        }
        if is_complete(f) {
            return Outcome::Accept(Certificate::Complete { rank: f.ambient_rank() });
        }
        let mut trace = Vec::new();
        for ray in 0..f.rays().len() {
            self.used += 1;
            if self.used > self.budget {
                return Outcome::OutOfBudget;
            }
            let Some(witness) = recognize_along(wf, ray) else {
                trace.push(format!("ray {ray}: not a modification along this ray"));
                continue;
            };
            match self.step(&witness) {
                Ok(cert) => return Outcome::Accept(cert),
                Err(Some(why)) => trace.push(format!("ray {ray}: {why}")),
                Err(None) => return Outcome::OutOfBudget,
            }
        }
        let reason = if f.rays().is_empty() {
            "not complete and has no rays".to_string()
        } else {
            "no ray presents the fan as a modification of quasilinear fans along a quasilinear divisor".to_string()
        };
        Outcome::Reject(reason, trace)
    }

    /// Recurses into the base and the divisor of a witness.
    fn step(&mut self, w: &ModificationWitness) -> std::result::Result<Certificate, Option<String>> {
        let base_certificate = match self.run(&w.base) {
            Outcome::Accept(c) => c,
            Outcome::Reject(reason, _) => return Err(Some(format!("base is not quasilinear ({reason})"))),
            Outcome::OutOfBudget => return Err(None),
        };
        let weil = w.divisor().weil.as_ref().map(|d| WeightedFan::new(d.fan().clone(), d.weights().clone()));
        let (divisor, divisor_certificate) = match weil {
            None => (None, None),
            Some(Err(e)) => return Err(Some(format!("divisor has invalid weights ({e})"))),
            Some(Ok(d)) => match self.run(&d) {
                Outcome::Accept(c) => (Some(FanData::of(&d)), Some(Box::new(c))),
                Outcome::Reject(reason, _) => return Err(Some(format!("divisor is not quasilinear ({reason})"))),
                Outcome::OutOfBudget => return Err(None),
            },
        };
        let bf = w.base.fan();
        Ok(Certificate::Modification {
            direction: w.direction,
            change: rows_of(&w.change),
            base: FanData::of(&w.base),
            phi: (0..bf.rays().len()).map(|r| w.phi.ray_value(bf, r)).collect(),
            divisor,
            base_certificate: Box::new(base_certificate),
            divisor_certificate,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub accepted: bool,
    pub log: Vec<String>,
}

/// Replays a certificate against `wf` without any search: leaves are checked
/// directly, restrictions and isomorphisms are applied, and each modification step is
/// rebuilt with [`modify`] and compared with the fan as a cycle (support and weights
/// on a common refinement). Structural problems are errors; mismatches reject.
pub fn verify_certificate(wf: &WeightedFan, cert: &Certificate) -> Result<VerifyReport> {
    let mut log = Vec::new();
    let accepted = verify_node(wf, cert, 0, &mut log)?;
    log.push(if accepted { "accepted".into() } else { "rejected".into() });
    Ok(VerifyReport { accepted, log })
}

fn verify_node(wf: &WeightedFan, cert: &Certificate, depth: usize, log: &mut Vec<String>) -> Result<bool> {
    let pad = "  ".repeat(depth);
    let f = wf.fan();
    let n = f.ambient_rank();
    match cert {
        Certificate::Complete { rank } => {
            let ok = *rank == n && is_complete(f) && wf.weights().values().all(One::is_one);
            log.push(format!("{pad}complete in rank {rank}: {}", if ok { "ok" } else { "fails" }));
            Ok(ok)
        }
        Certificate::Restrict { basis, inner } => {
            if basis.iter().any(|v| v.len() != n) {
                return Err(Error::MalformedCertificate("restriction basis has the wrong length".into()));
            }
            let lattice = LatticeBasis::span_of(n, basis);
            if lattice.rank() != basis.len() || !lattice.is_saturated() || basis.len() >= n {
                log.push(format!("{pad}restriction basis is not a proper saturated basis"));
                return Ok(false);
            }
            let columns = IntMatrix::from_columns(basis, n);
            let mut rays = Vec::with_capacity(f.rays().len());
            for v in f.rays() {
                match solve_integer(&columns, v) {
                    Some(c) => rays.push(c),
                    None => {
                        log.push(format!("{pad}ray {v:?} is outside the restriction lattice"));
                        return Ok(false);
                    }
                }
            }
            let inner_fan = Fan::new(basis.len(), rays, f.maximal_ray_sets())?;
            let inner_wf = wf.with_fan(inner_fan)?;
            log.push(format!("{pad}restrict to a rank {} sublattice", basis.len()));
            verify_node(&inner_wf, inner, depth + 1, log)
        }
        Certificate::Isomorphic { matrix, inner } => {
            let m = matrix_of(matrix, n)?;
            if m.rows() != n || !m.is_unimodular() {
                log.push(format!("{pad}isomorphism matrix is not unimodular"));
                return Ok(false);
            }
            let image = wf.with_fan(map_fan(f, &m)?)?;
            log.push(format!("{pad}apply a unimodular change of coordinates"));
            verify_node(&image, inner, depth + 1, log)
        }
        Certificate::Modification { direction, change, base, phi, divisor, base_certificate, divisor_certificate } => {
            if n == 0 || *direction >= f.rays().len() {
                return Err(Error::MalformedCertificate("modification direction is not a ray".into()));
            }
            let t = matrix_of(change, n)?;
            if t.rows() != n || !t.is_unimodular() {
                log.push(format!("{pad}change of coordinates is not unimodular"));
                return Ok(false);
            }
            let up = t.apply(f.ray(*direction));
            if !(is_zero_vector(&up[..n - 1]) && up[n - 1].is_one()) {
                log.push(format!("{pad}change does not send ray {direction} to the last basis vector"));
                return Ok(false);
            }
            let base_wf = base.build()?;
            if base_wf.ambient_rank() + 1 != n {
                return Err(Error::MalformedCertificate("base has the wrong rank".into()));
            }
            if phi.len() != base_wf.fan().rays().len() {
                return Err(Error::MalformedCertificate("function values do not match the base rays".into()));
            }
            log.push(format!("{pad}modification along ray {direction}: base of rank {}", n - 1));
            if !verify_node(&base_wf, base_certificate, depth + 1, log)? {
                return Ok(false);
            }
            let Ok(phi_fn) = PLFunction::from_heights(base_wf.fan(), phi) else {
                log.push(format!("{pad}function values are not piecewise integral linear on the base"));
                return Ok(false);
            };
            let m = match modify(&base_wf, &phi_fn) {
                Ok(m) => m,
                Err(e) => {
                    log.push(format!("{pad}modification fails: {e}"));
                    return Ok(false);
                }
            };
            let rebuilt_divisor = m.divisor.weil.as_ref().map(|d| WeightedFan::new_signed(d.fan().clone(), d.weights().clone()));
            match (rebuilt_divisor, divisor, divisor_certificate) {
                (None, None, None) => log.push(format!("{pad}divisor is trivial")),
                (Some(Ok(actual)), Some(recorded), Some(dc)) => {
                    let recorded = recorded.build()?;
                    if !same_cycle(&actual, &recorded) {
                        log.push(format!("{pad}recorded divisor differs from div(φ)"));
                        return Ok(false);
                    }
                    log.push(format!("{pad}divisor:"));
                    if !verify_node(&recorded, dc, depth + 1, log)? {
                        return Ok(false);
                    }
                }
                _ => {
                    log.push(format!("{pad}divisor data does not match div(φ)"));
                    return Ok(false);
                }
            }
            let moved = wf.with_fan(map_fan(f, &t)?)?;
            let ok = same_cycle(&m.fan, &moved);
            log.push(format!("{pad}replayed modification {} the fan", if ok { "matches" } else { "does not match" }));
            Ok(ok)
        }
    }
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("certificates serialize");
    s.push('\n');
    s
}

pub fn read_certificate(text: &str) -> Result<Certificate> {
    // certificates may be bare or embedded in a verdict report
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let node = match value.get("certificate") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(node).map_err(|e| Error::MalformedCertificate(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::vector;

    fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(rank, rays.iter().map(|r| vector(r)).collect(), cones.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn unit(f: Fan) -> WeightedFan {
        WeightedFan::unit(f).unwrap()
    }

    fn line() -> WeightedFan {
        unit(fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]]))
    }

    fn plane() -> WeightedFan {
        unit(fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
            &[&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]],
        ))
    }

    fn accepted(wf: &WeightedFan) -> Certificate {
        let verdict = recognize(wf);
        let cert = verdict.certificate().unwrap_or_else(|| panic!("{verdict:?}")).clone();
        let report = verify_certificate(wf, &cert).unwrap();
        assert!(report.accepted, "{:?}", report.log);
        cert
    }

    #[test]
    fn tropical_line_is_a_modification_of_r1() {
        let cert = accepted(&line());
        match &cert {
            Certificate::Modification { base_certificate, divisor_certificate, .. } => {
                assert_eq!(**base_certificate, Certificate::Complete { rank: 1 });
                let d = divisor_certificate.as_ref().unwrap();
                assert_eq!(
                    **d,
                    Certificate::Restrict { basis: vec![], inner: Box::new(Certificate::Complete { rank: 0 }) }
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(cert.depth(), 1);
    }

    #[test]
    fn cross_and_non_reduced_fans_are_rejected() {
        let cross = unit(fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0], &[1], &[2], &[3]]));
        match recognize(&cross) {
            Verdict::NotQuasilinear { reason, .. } => assert!(reason.contains("M1 has rank 2"), "{reason}"),
            other => panic!("unexpected {other:?}"),
        }
        let f = fan(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0], &[1], &[2]]);
        let wf = WeightedFan::from_list(f, vec![1.into(), 2.into(), 1.into()], false).unwrap();
        match recognize(&wf) {
            Verdict::NotQuasilinear { reason, .. } => assert_eq!(reason, "not reduced"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plane_round_trip_and_serialization() {
        let cert = accepted(&plane());
        assert_eq!(cert.depth(), 2);
        let text = write_certificate(&cert);
        assert_eq!(read_certificate(&text).unwrap(), cert);
    }

    #[test]
    fn classical_and_complete_fans() {
        let r2 = unit(fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]]));
        assert_eq!(accepted(&r2), Certificate::Complete { rank: 2 });
        let classical = unit(fan(2, &[&[1, 1], &[-1, -1]], &[&[0], &[1]]));
        assert!(matches!(accepted(&classical), Certificate::Restrict { .. }));
    }

    #[test]
    fn tampering_is_detected() {
        let wf = plane();
        let cert = accepted(&wf);
        let Certificate::Modification { divisor: Some(mut d), .. } = cert.clone() else { panic!() };
        d.weights[0] = BigInt::from(2);
        let mut bad = cert.clone();
        if let Certificate::Modification { divisor, .. } = &mut bad {
            *divisor = Some(d);
        }
        assert!(!verify_certificate(&wf, &bad).unwrap().accepted);

        let leaf = Certificate::Complete { rank: 3 };
        assert!(!verify_certificate(&wf, &leaf).unwrap().accepted);

        let mut wrong_direction = cert;
        if let Certificate::Modification { direction, .. } = &mut wrong_direction {
            *direction = 99;
        }
        assert!(matches!(verify_certificate(&wf, &wrong_direction), Err(Error::MalformedCertificate(_))));
    }

    #[test]
    fn isomorphic_nodes_are_replayed() {
        let wf = line();
        let inner = accepted(&unit(fan(2, &[&[1, 1], &[0, 1], &[-1, -2]], &[&[0], &[1], &[2]])));
        let cert = Certificate::Isomorphic { matrix: vec![vector(&[1, 0]), vector(&[1, 1])], inner: Box::new(inner) };
        assert!(verify_certificate(&wf, &cert).unwrap().accepted);
    }

    #[test]
    fn budget_gives_inconclusive() {
        assert!(matches!(recognize_with_budget(&plane(), 1), Verdict::Inconclusive { .. }));
    }

    #[test]
    fn refined_plane_is_still_recognized() {
        let refined = crate::polyfan::stellar_subdivision(plane().fan(), &vector(&[1, 1, 0])).unwrap();
        accepted(&unit(refined));
    }
}
