//! CSV writers for sweeps and trajectories.

use std::io::{self, Write};

use crate::dynamics::Trajectory;
use crate::sweep::SweepRecord;

pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

pub const SWEEP_HEADER: &str = "theta,gamma,regime,re1,im1,re2,im2,re3,im3,gammaL1,gammaL2,gammaL3,gammaT,ratio,lx1,ly1,lz1,lx2,ly2,lz2,lx3,ly3,lz3";
pub const TRAJECTORY_HEADER: &str = "tau,rx,ry,rz";

/// `%.{digits}g`-style formatting: shortest of fixed and scientific
/// notation, trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}{:02}", strip_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(x: f64) -> String {
    format_sig(x, CSV_SIGNIFICANT_DIGITS)
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn sweep_row(r: &SweepRecord) -> String {
    let mut f = vec![num(r.theta), num(r.gamma), r.regime.as_str().to_string()];
    for z in &r.eigenvalues {
        f.push(num(z.re));
        f.push(num(z.im));
    }
    for k in 0..3 {
        f.push(opt(r.gamma_l.get(k).copied()));
    }
    f.push(opt(r.gamma_t));
    f.push(opt(r.ratio));
    for k in 0..3 {
        match r.directions.get(k).copied().flatten() {
            Some(l) => f.extend(l.iter().map(|&x| num(x))),
            None => f.extend(std::iter::repeat_n(String::new(), 3)),
        }
    }
    f.join(",")
}

pub fn write_sweep_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(w, "{}", sweep_row(r))?;
    }
    w.flush()
}

pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for (t, s) in traj.taus.iter().zip(&traj.states) {
        let [x, y, z] = s.bloch_vector;
        writeln!(w, "{},{},{},{}", num(*t), num(x), num(y), num(z))?;
    }
    w.flush()
}
