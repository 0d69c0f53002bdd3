//! Data behind the three figures: SDPI curves, mixing-time bounds and the
//! relative-entropy LDP comparison. Everything is emitted as CSV.

use std::fmt::Write as _;

use hsdp_core::bounds::{linear_sdpi, mixing_time_delta, mixing_time_linear, mixing_time_nonlinear, nonlinear_sdpi, SdpiParams};
use hsdp_core::privacy::{dasgupta_bound, re_ldp_bound};
use hsdp_core::{Error, Result};

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::BadRange(format!("grid needs at least 2 points, got {points}")));
    }
    if !(start.is_finite() && stop.is_finite() && start <= stop) {
        return Err(Error::BadRange(format!("grid range [{start}, {stop}] is empty or not finite")));
    }
    let n = (points - 1) as f64;
    Ok((0..points).map(|i| if i == points - 1 { stop } else { start + (stop - start) * i as f64 / n }).collect())
}

/// One row of the SDPI comparison: the three upper bounds on the output
/// `E_{γ'}` as a function of the input value `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub dpi: f64,
    pub linear: f64,
    pub nonlinear: f64,
}

pub fn compare_rows(gamma: f64, gamma_prime: f64, delta: f64, ts: &[f64]) -> Result<Vec<CompareRow>> {
    let coeff = linear_sdpi(gamma, gamma_prime, delta)?;
    ts.iter()
        .map(|&t| {
            Ok(CompareRow { t, dpi: t, linear: coeff * t, nonlinear: nonlinear_sdpi(SdpiParams::new(gamma, gamma_prime, delta, t)?)? })
        })
        .collect()
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = String::from("t,dpi,linear,nonlinear\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.t, r.dpi, r.linear, r.nonlinear);
    }
    s
}

/// Mixing-time bounds at one `β`; `None` means no finite bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingRow {
    pub beta: f64,
    pub linear: Option<u64>,
    pub nonlinear: Option<u64>,
}

/// Linear and non-linear mixing-time bounds for `N ∈ B^{γ,δ}` at order `γ'`.
/// For `δ = 0` the non-linear bound is finite down to `β = 0`; for `δ > 0`
/// it follows the hitting-time recursion and is unbounded at `β = 0`.
pub fn mixing_rows(gamma: f64, gamma_prime: f64, delta: f64, betas: &[f64]) -> Result<Vec<MixingRow>> {
    betas
        .iter()
        .map(|&beta| {
            let linear = mixing_time_linear(gamma, gamma_prime, delta, beta)?.steps();
            let nonlinear = if delta == 0.0 {
                Some(mixing_time_nonlinear(gamma, gamma_prime, beta)?)
            } else if beta <= 0.0 {
                None
            } else if beta >= 1.0 {
                Some(0)
            } else {
                Some(mixing_time_delta(gamma, gamma_prime, delta, beta)?)
            };
            Ok(MixingRow { beta, linear, nonlinear })
        })
        .collect()
}

fn opt(v: Option<u64>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}

pub fn mixing_csv(rows: &[MixingRow]) -> String {
    let mut s = String::from("beta,linear,nonlinear\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.beta, opt(r.linear), opt(r.nonlinear));
    }
    s
}

/// Which parameter the relative-entropy comparison sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// `x = λ = m`, one family per `ε`, fixed `δ`.
    Lambda,
    /// `x = ε`, one family per `δ`, fixed `λ = m`.
    Epsilon,
}

/// Fixed scalars of the comparison. `fixed` is `δ` for a λ-sweep and
/// `λ = m` for an ε-sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RevPinskerSpec {
    pub mode: SweepMode,
    pub families: Vec<f64>,
    pub fixed: f64,
    pub tau: f64,
}

impl RevPinskerSpec {
    /// Left panel: `ε ∈ {1, 2, 3}`, `δ = 0.01`, `τ = 0.25`.
    pub fn lambda_default() -> Self {
        RevPinskerSpec { mode: SweepMode::Lambda, families: vec![1.0, 2.0, 3.0], fixed: 0.01, tau: 0.25 }
    }

    /// Right panel: `δ ∈ {0.1, 0.2, 0.3}`, `λ = m = 0.1`, `τ = 0.25`.
    pub fn epsilon_default() -> Self {
        RevPinskerSpec { mode: SweepMode::Epsilon, families: vec![0.1, 0.2, 0.3], fixed: 0.1, tau: 0.25 }
    }

    /// Default x-range for the sweep.
    pub fn default_range(&self) -> (f64, f64) {
        match self.mode {
            SweepMode::Lambda => (0.02, 0.5),
            SweepMode::Epsilon => (0.5, 3.0),
        }
    }

    fn tag(&self, family: f64) -> String {
        match self.mode {
            SweepMode::Lambda => format!("eps{family}"),
            SweepMode::Epsilon => format!("delta{family}"),
        }
    }
}

/// Our bound and the prior bound for each family at each `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct RevPinskerTable {
    pub header: Vec<String>,
    /// `x` followed by `(ours, prior)` per family.
    pub rows: Vec<Vec<f64>>,
}

pub fn revpinsker_table(spec: &RevPinskerSpec, xs: &[f64]) -> Result<RevPinskerTable> {
    if spec.families.is_empty() {
        return Err(Error::BadRange("no families to sweep".into()));
    }
    let mut header = vec!["x".to_string()];
    for &f in &spec.families {
        header.push(format!("ours_{}", spec.tag(f)));
        header.push(format!("prior_{}", spec.tag(f)));
    }
    let rows = xs
        .iter()
        .map(|&x| {
            let mut row = vec![x];
            for &f in &spec.families {
                let (eps, delta, lambda) = match spec.mode {
                    SweepMode::Lambda => (f, spec.fixed, x),
                    SweepMode::Epsilon => (x, f, spec.fixed),
                };
                row.push(re_ldp_bound(eps, delta, spec.tau, lambda)?);
                row.push(dasgupta_bound(eps, delta, spec.tau, lambda)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RevPinskerTable { header, rows })
}

pub fn revpinsker_csv(table: &RevPinskerTable) -> String {
    let mut s = table.header.join(",");
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Which figure a gnuplot script is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    Compare,
    Mixing,
    RevPinsker,
}

/// A gnuplot script that plots the CSV at `data`. For the relative-entropy
/// figure `families` is the number of `(ours, prior)` column pairs.
pub fn gnuplot_script(kind: FigureKind, data: &str, families: usize) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
    match kind {
        FigureKind::Compare => {
            s.push_str("set xlabel \"input E_{gamma'}\"\nset ylabel \"output E_{gamma'}\"\n");
            let _ = writeln!(s, "plot '{data}' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines");
        }
        FigureKind::Mixing => {
            s.push_str("set xlabel \"beta\"\nset ylabel \"iterations\"\n");
            let _ = writeln!(s, "plot '{data}' using 1:2 with steps, '' using 1:3 with steps");
        }
        FigureKind::RevPinsker => {
            s.push_str("set xlabel \"x\"\nset ylabel \"relative entropy bound\"\n");
            let parts: Vec<String> = (0..families.max(1))
                .flat_map(|k| {
                    let (ours, prior) = (2 + 2 * k, 3 + 2 * k);
                    [format!("'{data}' using 1:{ours} with lines dt 1"), format!("'{data}' using 1:{prior} with lines dt 2")]
                })
                .collect();
            let _ = writeln!(s, "plot {}", parts.join(", "));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = grid(0.0, 1.0, 201).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[60], 0.3);
        assert_eq!(g[200], 1.0);
        assert!(grid(0.0, 1.0, 1).is_err());
        assert!(grid(1.0, 0.0, 5).is_err());
    }

    #[test]
    fn compare_rows_at_default_parameters() {
        let rows = compare_rows(6.0, 2.5, 0.01, &[0.0, 0.3, 1.0]).unwrap();
        assert_eq!((rows[0].dpi, rows[0].linear, rows[0].nonlinear), (0.0, 0.0, 0.0));
        assert!((rows[1].linear - 0.1515).abs() < 1e-15 && (rows[1].nonlinear - 0.003).abs() < 1e-15);
        assert!((rows[2].linear - 0.505).abs() < 1e-15 && (rows[2].nonlinear - 0.505).abs() < 1e-15);
    }

    #[test]
    fn mixing_rows_at_default_parameters() {
        let rows = mixing_rows(8.0, 3.0, 0.0, &[0.0, 0.1, 0.5]).unwrap();
        assert_eq!(rows[0], MixingRow { beta: 0.0, linear: None, nonlinear: Some(3) });
        assert_eq!(rows[1], MixingRow { beta: 0.1, linear: Some(4), nonlinear: Some(3) });
        assert_eq!(rows[2], MixingRow { beta: 0.5, linear: Some(2), nonlinear: Some(2) });
        assert!(mixing_csv(&rows).starts_with("beta,linear,nonlinear\n0,,3\n0.1,4,3\n"));
    }

    #[test]
    fn revpinsker_rows() {
        let spec = RevPinskerSpec::epsilon_default();
        let t = revpinsker_table(&spec, &[1.0]).unwrap();
        assert_eq!(t.header[1], "ours_delta0.1");
        assert!(t.rows[0][1] < t.rows[0][2]);
        let zero = RevPinskerSpec { families: vec![0.0], ..spec };
        let t = revpinsker_table(&zero, &[1.0, 2.0]).unwrap();
        for row in &t.rows {
            assert!((row[1] - row[2]).abs() < 1e-12);
        }
        let left = revpinsker_table(&RevPinskerSpec::lambda_default(), &[0.3]).unwrap();
        assert!(left.rows[0][3] <= left.rows[0][4]);
    }
}
