//! Bloch-grid scan of the broadcastability threshold: feasibility of the
//! measure-and-prepare construction against the max-relative-entropy
//! predicate, checked point by point over qubit targets.

use serde::{Deserialize, Serialize};

use crate::catalysis::construct_dmax_broadcast;
use crate::error::Result;
use crate::freeset::{compose, is_rng, CompositionRule, FreeSet, RngStrategy, Verdict};
use crate::monotone::dmax;
use crate::qmat::{Complex64, ComplexMatrix, DensityMatrix, Factorization};

/// One grid point of the scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub dmax_bits: f64,
    pub predicted_feasible: bool,
    pub constructed_feasible: bool,
    /// For feasible points: CPTP + broadcast-intact + RNG all verified.
    pub checks_ok: bool,
}

/// Scan summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub grid: usize,
    pub threshold_bits: f64,
    pub points_total: usize,
    pub points_skipped: usize,
    pub feasible: usize,
    pub mismatches: usize,
    pub check_failures: usize,
    pub points: Vec<ScanPoint>,
}

impl ScanReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.check_failures == 0
    }

    /// CSV rendering: one row per evaluated grid point.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("x,y,z,dmax_bits,predicted_feasible,constructed_feasible,checks_ok\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{:.12e},{},{},{}\n",
                p.x, p.y, p.z, p.dmax_bits, p.predicted_feasible, p.constructed_feasible, p.checks_ok
            ));
        }
        out
    }
}

/// Qubit state from Bloch coordinates.
fn bloch_state(x: f64, y: f64, z: f64, label: &str) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(2, 2);
    m.set(0, 0, Complex64::new((1.0 + z) / 2.0, 0.0));
    m.set(1, 1, Complex64::new((1.0 - z) / 2.0, 0.0));
    m.set(0, 1, Complex64::new(x / 2.0, -y / 2.0));
    m.set(1, 0, Complex64::new(x / 2.0, y / 2.0));
    DensityMatrix::with_tols(m, Factorization::single(2, label)?, 1e-9, 1e-7, 1e-9)
}

/// Run the threshold scan on an n³ Bloch grid (points outside the ball are
/// skipped). The catalyst free state is γ_C, the system family `f_s`; for
/// each valid target σ the construction's feasibility must agree with
/// D_max(σ‖F_S) ≤ log₂(1/λ₁(γ_C)) within the stated margin, and every
/// feasible channel must pass CPTP validation, leave the broadcast state
/// intact, and be RNG into the Max composite.
pub fn threshold_scan(
    gamma_c: &DensityMatrix,
    f_s: &FreeSet,
    grid: usize,
    jobs: usize,
) -> Result<ScanReport> {
    let lambda1 = gamma_c.eig()?.min_value();
    let threshold_bits = (1.0 / lambda1).log2();
    let margin = 1e-7;

    let mut coords = Vec::new();
    let mut skipped = 0usize;
    for ix in 0..grid {
        for iy in 0..grid {
            for iz in 0..grid {
                let step = |i: usize| -> f64 {
                    if grid == 1 {
                        0.0
                    } else {
                        -1.0 + 2.0 * i as f64 / (grid - 1) as f64
                    }
                };
                let (x, y, z) = (step(ix), step(iy), step(iz));
                if x * x + y * y + z * z > 1.0 + 1e-12 {
                    skipped += 1;
                    continue;
                }
                coords.push((x, y, z));
            }
        }
    }

    let run_point = |&(x, y, z): &(f64, f64, f64)| -> Result<ScanPoint> {
        let sigma = bloch_state(x, y, z, "S")?;
        let value = dmax(&sigma, f_s)?.value_bits;
        let predicted = value <= threshold_bits + margin;
        let built = construct_dmax_broadcast(gamma_c, f_s, &sigma)?;
        let checks_ok = if built.feasible {
            let channel = built.channel.as_ref().expect("feasible construction has a channel");
            let cptp = channel.validate_cptp(1e-8)?;
            let f_out = compose(
                vec![f_s.clone(), FreeSet::Singleton(gamma_c.clone())],
                CompositionRule::Max,
            )?;
            let broadcast =
                crate::catalysis::verify_broadcast(channel, &built.psi, f_s, 1e-8)?;
            let rng = is_rng(
                channel,
                &FreeSet::Singleton(gamma_c.clone()),
                &f_out,
                RngStrategy::Auto,
                1e-6,
            )?;
            cptp.cp_ok && cptp.tp_ok && broadcast.intact && rng.rng == Verdict::Member
        } else {
            true
        };
        Ok(ScanPoint {
            x,
            y,
            z,
            dmax_bits: value,
            predicted_feasible: predicted,
            constructed_feasible: built.feasible,
            checks_ok,
        })
    };

    let points: Vec<ScanPoint> = if jobs <= 1 {
        coords.iter().map(&run_point).collect::<Result<_>>()?
    } else {
        let chunk = coords.len().div_ceil(jobs);
        let mut slots: Vec<Vec<Result<ScanPoint>>> = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for part in coords.chunks(chunk) {
                handles.push(scope.spawn(move || part.iter().map(run_point).collect::<Vec<_>>()));
            }
            for h in handles {
                slots.push(h.join().expect("scan worker panicked"));
            }
        });
        let mut flat = Vec::with_capacity(coords.len());
        for slot in slots {
            for p in slot {
                flat.push(p?);
            }
        }
        flat
    };

    let feasible = points.iter().filter(|p| p.constructed_feasible).count();
    let mismatches = points
        .iter()
        .filter(|p| p.predicted_feasible != p.constructed_feasible)
        .count();
    let check_failures = points.iter().filter(|p| !p.checks_ok).count();
    Ok(ScanReport {
        grid,
        threshold_bits,
        points_total: coords.len(),
        points_skipped: skipped,
        feasible,
        mismatches,
        check_failures,
        points,
    })
}

/// The scan instance used by the acceptance suite: γ_C = diag(0.7, 0.3) and
/// the singleton system family {diag(0.6, 0.4)}.
pub fn reference_scan(grid: usize, jobs: usize) -> Result<ScanReport> {
    let gamma_c = DensityMatrix::from_probs(&[0.7, 0.3], "C")?;
    let f_s = FreeSet::Singleton(DensityMatrix::from_probs(&[0.6, 0.4], "S")?);
    threshold_scan(&gamma_c, &f_s, grid, jobs)
}
