use nalgebra::Complex;
use rustfft::FftPlanner;

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MIN_SAMPLES: usize = 64;
const MIN_PERIODS: f64 = 5.0;
/// Fraction of samples dropped at each end before any statistic.
const EDGE_TRIM: f64 = 0.05;
/// Late-window standard deviation of `s_p` below which signals count as locked.
pub const LOCKED_STD: f64 = 0.1;

/// Unwrapped instantaneous phase of an oscillating series.
///
/// The running mean over one estimated period is removed, the analytic
/// signal is formed with a frequency-domain Hilbert transform and its
/// argument is unwrapped. A pure `sin(ωt)` yields `ωt - π/2`.
pub fn extract_phase<T: Real>(series: &TimeSeries<T>) -> Result<TimeSeries<T>> {
    let n = series.len();
    if n < MIN_SAMPLES {
        return Err(Error::SeriesTooShort {
            len: n,
            min: MIN_SAMPLES,
        });
    }
    uniform_step(&series.times)?;
    let x: Vec<f64> = series.values.iter().map(|v| v.f64()).collect();

    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let spectrum = fft(&centered.iter().map(|&v| Complex::new(v, 0.0)).collect::<Vec<_>>(), false);
    if spectrum.iter().all(|c| c.norm() < 1e-12) {
        return Err(Error::ZeroAmplitude { fraction: 100.0 });
    }
    let peak = (1..=n / 2)
        .max_by(|&a, &b| spectrum[a].norm_sqr().total_cmp(&spectrum[b].norm_sqr()))
        .unwrap_or(1);
    let periods = peak as f64;
    if periods < MIN_PERIODS {
        return Err(Error::TooFewPeriods {
            periods,
            min: MIN_PERIODS,
        });
    }
    let window = ((n as f64 / periods).round() as usize).max(1);
    let detrended = subtract_running_mean(&x, window);

    let z = analytic_signal(&detrended);
    let floor = 1e-12;
    let vanishing = z.iter().filter(|c| c.norm() < floor).count();
    if vanishing * 10 > n {
        return Err(Error::ZeroAmplitude {
            fraction: 100.0 * vanishing as f64 / n as f64,
        });
    }
    let phase = unwrap(&z.iter().map(|c| c.arg()).collect::<Vec<_>>());
    TimeSeries::new(series.times.clone(), phase.into_iter().map(T::lit).collect())
}

/// `s_p(t) = cos(φ2(t) - φ1(t))` on a shared time grid.
pub fn phase_locking_sp<T: Real>(series1: &TimeSeries<T>, series2: &TimeSeries<T>) -> Result<TimeSeries<T>> {
    if series1.times != series2.times {
        return Err(Error::DimensionMismatch("s_p needs both series on the same time grid".into()));
    }
    let p1 = extract_phase(series1)?;
    let p2 = extract_phase(series2)?;
    let values = p1
        .values
        .iter()
        .zip(&p2.values)
        .map(|(&a, &b)| (b - a).cos().max(-T::one()).min(T::one()))
        .collect();
    TimeSeries::new(series1.times.clone(), values)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseLockStats {
    pub mean: f64,
    pub std: f64,
    /// Whether the late-window standard deviation is below [`LOCKED_STD`].
    pub locked: bool,
}

/// Mean and standard deviation of the final half of a series after 5% of
/// the samples are dropped at each end.
pub fn phase_lock_stats<T: Real>(series: &TimeSeries<T>) -> Result<PhaseLockStats> {
    let n = series.len();
    let trim = (n as f64 * EDGE_TRIM).floor() as usize;
    if n < 2 * trim + 4 {
        return Err(Error::SeriesTooShort { len: n, min: 2 * trim + 4 });
    }
    let inner = &series.values[trim..n - trim];
    let late = &inner[inner.len() / 2..];
    let (mean, std) = mean_std(late.iter().map(|v| v.f64()));
    Ok(PhaseLockStats {
        mean,
        std,
        locked: std < LOCKED_STD,
    })
}

pub(crate) fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count().max(1) as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn uniform_step<T: Real>(times: &[T]) -> Result<f64> {
    let t: Vec<f64> = times.iter().map(|v| v.f64()).collect();
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::NonUniformGrid);
    }
    for w in t.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(Error::NonUniformGrid);
        }
    }
    Ok(dt)
}

/// Centered moving average; windows are shortened at the ends.
fn subtract_running_mean(x: &[f64], window: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    let half = window / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + window - half).min(n);
            x[i] - (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

fn analytic_signal(x: &[f64]) -> Vec<Complex<f64>> {
    let n = x.len();
    let mut spec = fft(&x.iter().map(|&v| Complex::new(v, 0.0)).collect::<Vec<_>>(), false);
    for (k, z) in spec.iter_mut().enumerate() {
        let h = if k == 0 || (n % 2 == 0 && k == n / 2) {
            1.0
        } else if k < n.div_ceil(2) {
            2.0
        } else {
            0.0
        };
        *z *= h;
    }
    let scale = 1.0 / n as f64;
    fft(&spec, true).into_iter().map(|z| z * scale).collect()
}

fn fft(x: &[Complex<f64>], inverse: bool) -> Vec<Complex<f64>> {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(x.len())
    } else {
        planner.plan_fft_forward(x.len())
    };
    let mut buf = x.to_vec();
    plan.process(&mut buf);
    buf
}

fn unwrap(phase: &[f64]) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    let mut prev = phase[0];
    for &p in phase {
        let d = p - prev;
        if d > PI {
            offset -= TAU * ((d + PI) / TAU).floor();
        } else if d < -PI {
            offset += TAU * ((-d + PI) / TAU).floor();
        }
        prev = p;
        out.push(p + offset);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    fn interior(n: usize) -> std::ops::Range<usize> {
        n / 10..n - n / 10
    }

    #[test]
    fn pure_tone_recovers_slope_and_offset() {
        let w = 3.0;
        let s = TimeSeries::from_fn(grid(4000, 0.01), |t| (w * t).sin());
        let p = extract_phase(&s).unwrap();
        let r = interior(4000);
        let slope = (p.values[r.end] - p.values[r.start]) / (p.times[r.end] - p.times[r.start]);
        assert!((slope - w).abs() < 1e-3 * w, "{slope}");
        for i in r {
            let expected = w * p.times[i] - FRAC_PI_2;
            let d = (p.values[i] - expected).rem_euclid(std::f64::consts::TAU);
            assert!(d.min(std::f64::consts::TAU - d) < 2e-2);
        }
    }

    #[test]
    fn amplitude_and_offset_invariance() {
        let t = grid(2048, 0.02);
        let a = extract_phase(&TimeSeries::from_fn(t.clone(), |t| (2.0 * t).sin())).unwrap();
        let b = extract_phase(&TimeSeries::from_fn(t, |t| 0.37 * (2.0 * t).sin() + 4.0)).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn chirp_phase_is_tracked() {
        let (w, eps) = (5.0, 0.2);
        let s = TimeSeries::from_fn(grid(8000, 0.01), |t| (w * t + 0.1 * (eps * t).sin()).sin());
        let p = extract_phase(&s).unwrap();
        let r = interior(8000);
        let shift = p.values[r.start] - (w * p.times[r.start] + 0.1 * (eps * p.times[r.start]).sin());
        for i in r {
            let want = w * p.times[i] + 0.1 * (eps * p.times[i]).sin() + shift;
            assert!((p.values[i] - want).abs() < 1e-2, "t={} {}", p.times[i], p.values[i] - want);
        }
    }

    #[test]
    fn preconditions_are_checked() {
        let short = TimeSeries::from_fn(grid(32, 0.1), |t| t.sin());
        assert!(matches!(extract_phase(&short), Err(Error::SeriesTooShort { .. })));
        let slow = TimeSeries::from_fn(grid(200, 0.01), |t| (3.0 * t).sin());
        assert!(matches!(extract_phase(&slow), Err(Error::TooFewPeriods { .. })));
        let flat = TimeSeries::from_fn(grid(512, 0.1), |_| 3.0);
        assert!(matches!(extract_phase(&flat), Err(Error::ZeroAmplitude { .. })));
        let tiny = TimeSeries::from_fn(grid(512, 0.1), |t| 1e-15 * (4.0 * t).sin());
        assert!(matches!(extract_phase(&tiny), Err(Error::ZeroAmplitude { .. })));
        let mut t = grid(256, 0.1);
        t[100] += 0.03;
        let bad = TimeSeries::from_fn(t, |t| (4.0 * t).sin());
        assert!(matches!(extract_phase(&bad), Err(Error::NonUniformGrid)));
    }

    #[test]
    fn locking_examples() {
        let t = grid(4000, 0.01);
        let s1 = TimeSeries::from_fn(t.clone(), |t| (4.0 * t).sin());
        let same = phase_locking_sp(&s1, &s1).unwrap();
        assert!(same.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let flipped = TimeSeries::from_fn(t.clone(), |t| -(4.0 * t).sin());
        let anti = phase_locking_sp(&s1, &flipped).unwrap();
        let r = interior(4000);
        assert!(anti.values[r.clone()].iter().all(|&v| (v + 1.0).abs() < 1e-3));
        assert!(phase_lock_stats(&anti).unwrap().locked);

        let a = TimeSeries::from_fn(t.clone(), |t| (4.0 * t).sin());
        let b = TimeSeries::from_fn(t, |t| (6.0 * t).sin());
        let drift = phase_locking_sp(&a, &b).unwrap();
        // Phase difference 2t - π/2 + π/2: s_p = cos(2t).
        for i in r {
            assert!((drift.values[i] - (2.0 * drift.times[i]).cos()).abs() < 2e-2);
        }
        assert!(!phase_lock_stats(&drift).unwrap().locked);
    }
}
