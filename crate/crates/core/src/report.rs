//! CSV and JSON artifacts: density grids, walk-survival curves and
//! Monte-Carlo histograms.
//!
//! Floats are written in shortest round-trip form, so re-parsing a file
//! yields the exact values that were computed.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::circle::{density_pt, p_star_hoop, prob_comb_below_plane, ThetaTriple};
use crate::error::{Error, Result};
use crate::interval::{density_p_at, p_star_beam, prob_comb_below_line};
use crate::montecarlo::{estimate_comb_below, Estimate, ExperimentConfig, ExperimentResult, FixedPlacement};
use crate::quadrature::QuadratureSpec;

/// Which body a walk-survival curve belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    Beam,
    Hoop,
}

fn grid_points(lo: f64, hi: f64, grid: usize) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(Error::InvalidInput(format!("grid must have at least 2 points per axis, got {grid}")));
    }
    let last = (grid - 1) as f64;
    Ok((0..grid).map(|i| if i + 1 == grid { hi } else { lo + (hi - lo) * i as f64 / last }).collect())
}

/// `a1,a2,p` on a `grid x grid` lattice over `[-1, 0] x [0, 1]`, `a1` outer.
pub fn write_density_interval<W: Write>(grid: usize, out: W) -> Result<()> {
    let (xs, ys) = (grid_points(-1.0, 0.0, grid)?, grid_points(0.0, 1.0, grid)?);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a1", "a2", "p"])?;
    for &a1 in &xs {
        for &a2 in &ys {
            w.serialize((a1, a2, density_p_at(a1, a2)?))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `theta1,theta2,p_T` on a `grid x grid` lattice over `[0, pi]^2`, keeping
/// only the points strictly inside the gap triangle.
pub fn write_density_circle<W: Write>(grid: usize, out: W) -> Result<()> {
    let pts = grid_points(0.0, std::f64::consts::PI, grid)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta1", "theta2", "p_T"])?;
    // interior test on lattice indices, so rounding never admits an edge point
    let last = grid - 1;
    for (i, &t1) in pts.iter().enumerate() {
        for (j, &t2) in pts.iter().enumerate() {
            if i == last || j == last || i + j <= last {
                continue;
            }
            let theta = ThetaTriple::from_pair(t1, t2)?;
            w.serialize((t1, t2, density_pt(&theta)))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Walk-survival probability at `mu`.
pub fn p_star(body: Body, mu: f64) -> Result<f64> {
    match body {
        Body::Beam => p_star_beam(mu),
        Body::Hoop => p_star_hoop(mu, &QuadratureSpec::monte_carlo()),
    }
}

/// `mu,p_star` at the given values of `mu`.
pub fn write_p_star<W: Write>(body: Body, mus: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mu", "p_star"])?;
    for &mu in mus {
        w.serialize((mu, p_star(body, mu)?))?;
    }
    w.flush()?;
    Ok(())
}

/// `steps + 1` equally spaced values of `mu` in `[0, 1]`.
pub fn mu_steps(steps: usize) -> Result<Vec<f64>> {
    if steps < 1 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    Ok((0..=steps).map(|i| i as f64 / steps as f64).collect())
}

/// Histogram rows with the empirical and the analytic density averaged
/// over each bin. Both densities are normalized to unit mass over the
/// histogram domain.
pub fn write_histogram<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let h = &result.histogram;
    if result.expected.len() != h.n_bins() {
        return Err(Error::InvalidInput("result carries no expected bin masses".into()));
    }
    let fractions = h.fractions();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_lo_1", "bin_hi_1", "bin_lo_2", "bin_hi_2", "count", "empirical_density", "analytic_density"])?;
    for ix in 0..h.nx() {
        for iy in 0..h.ny() {
            let b = ix * h.ny() + iy;
            let area = h.bin_area(ix, iy);
            let (emp, ana) = if area > 0.0 { (fractions[b] / area, result.expected[b] / area) } else { (0.0, 0.0) };
            w.serialize((
                h.x_edges()[ix],
                h.x_edges()[ix + 1],
                h.y_edges()[iy],
                h.y_edges()[iy + 1],
                h.count(ix, iy),
                emp,
                ana,
            ))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Limit and simulated probability that a comb lies below a fixed line or
/// plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombBelowReport {
    pub surface: String,
    /// `true` when the line or plane never rises above the ceiling.
    pub case_one: bool,
    pub limit: f64,
    pub estimate: Estimate,
    /// `(estimate - limit) / std_error`, 0 when both agree exactly.
    pub z: f64,
}

pub fn comb_below_report(cfg: &ExperimentConfig, placement: FixedPlacement<'_>) -> Result<CombBelowReport> {
    let (surface, case_one, limit) = match placement {
        FixedPlacement::Line(l) => ("line", l.x_star().is_none(), prob_comb_below_line(l)),
        FixedPlacement::Plane(p) => ("plane", p.is_case_one(), prob_comb_below_plane(p)),
    };
    let estimate = estimate_comb_below(cfg, placement)?;
    let diff = estimate.value - limit;
    let z = if diff == 0.0 { 0.0 } else { diff / estimate.std_error };
    Ok(CombBelowReport { surface: surface.into(), case_one, limit, estimate, z })
}

/// Pretty JSON for any serializable report.
pub fn write_json<W: Write, S: Serialize>(value: &S, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{run_circle_experiment, run_interval_experiment, ExperimentConfig, ExperimentKind};

    fn rows(bytes: &[u8]) -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_reader(bytes);
        r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
    }

    #[test]
    fn interval_grid_corners() {
        let mut buf = Vec::new();
        write_density_interval(2, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("a1,a2,p\n"));
        let r = rows(&buf);
        assert_eq!(r.len(), 4);
        let find = |a1: &str, a2: &str| r.iter().find(|row| row[0] == a1 && row[1] == a2).unwrap()[2].clone();
        assert_eq!(find("0.0", "0.0").parse::<f64>().unwrap(), 0.0);
        assert_eq!(find("-1.0", "1.0").parse::<f64>().unwrap(), 1.0);
    }

    #[test]
    fn values_round_trip_bitwise() {
        let mut buf = Vec::new();
        write_density_interval(7, &mut buf).unwrap();
        for row in rows(&buf) {
            let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
            assert_eq!(v[2].to_bits(), density_p_at(v[0], v[1]).unwrap().to_bits());
        }
        let mut buf = Vec::new();
        write_density_circle(9, &mut buf).unwrap();
        for row in rows(&buf) {
            let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
            let theta = ThetaTriple::from_pair(v[0], v[1]).unwrap();
            assert_eq!(v[2].to_bits(), density_pt(&theta).to_bits());
        }
    }

    #[test]
    fn circle_grid_keeps_interior_points_only() {
        let mut buf = Vec::new();
        write_density_circle(5, &mut buf).unwrap();
        // interior lattice points of a 5x5 grid over [0, pi]^2 with t1 + t2 > pi
        assert_eq!(rows(&buf).len(), 3);
    }

    #[test]
    fn p_star_rows() {
        let mut buf = Vec::new();
        write_p_star(Body::Beam, &mu_steps(2).unwrap(), &mut buf).unwrap();
        let r = rows(&buf);
        assert_eq!(r[0], ["0.0", "1.0"]);
        assert!((r[1][1].parse::<f64>().unwrap() - 0.252315).abs() < 1e-6);
        assert_eq!(r[2][1].parse::<f64>().unwrap(), 0.0);
        let mut buf = Vec::new();
        write_p_star(Body::Hoop, &[0.5, 0.7], &mut buf).unwrap();
        assert!(rows(&buf).iter().all(|row| row[1].parse::<f64>().unwrap() == 0.0));
        assert!(mu_steps(0).is_err());
        assert!(write_density_interval(1, Vec::new()).is_err());
    }

    #[test]
    fn comb_below_line_report() {
        use crate::interval::{LinePlacement, SupportPoint2};
        let line = LinePlacement::new(1.0, 1.0, SupportPoint2::new(-0.5, 0.5).unwrap()).unwrap();
        let cfg = ExperimentConfig::new(ExperimentKind::Interval, 500, 4000, 2, 9);
        let r = comb_below_report(&cfg, FixedPlacement::Line(&line)).unwrap();
        assert!(r.case_one);
        assert!((r.limit - (-1.0f64).exp()).abs() < 1e-12);
        assert!(r.z.abs() < 4.0, "{r:?}");
        let mut buf = Vec::new();
        write_json(&r, &mut buf).unwrap();
        let back: CombBelowReport = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn histogram_rows_sum_to_samples() {
        let cfg = ExperimentConfig::new(ExperimentKind::Interval, 50, 500, 4, 3);
        let result = run_interval_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        write_histogram(&result, &mut buf).unwrap();
        let r = rows(&buf);
        assert_eq!(r.len(), 16);
        let counts: u64 = r.iter().map(|row| row[4].parse::<u64>().unwrap()).sum();
        assert_eq!(counts, cfg.trials - result.degenerate_count);

        let cfg = ExperimentConfig::new(ExperimentKind::Circle, 51, 300, 4, 3);
        let result = run_circle_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        write_histogram(&result, &mut buf).unwrap();
        let h = &result.histogram;
        let (mut emp, mut ana) = (0.0, 0.0);
        for (b, row) in rows(&buf).iter().enumerate() {
            let area = h.bin_area(b / h.ny(), b % h.ny());
            emp += row[5].parse::<f64>().unwrap() * area;
            ana += row[6].parse::<f64>().unwrap() * area;
        }
        assert!((emp - 1.0).abs() < 1e-9, "{emp}");
        assert!((ana - 1.0).abs() < 1e-4, "{ana}");
    }
}
