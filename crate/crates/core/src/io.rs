//! Tabular text output: a header row, comma-separated, floats with 17
//! significant digits.

use std::io::{self, BufRead, Write};

use crate::cascade::ModeCoefficients;
use crate::spectrum::SpectrumTables;
use crate::Scalar;

fn num<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.f64())
}

/// One row per `(n, m)` with `n + m <= N`.
pub fn write_tables<T: Scalar, W: Write>(tables: &SpectrumTables<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "n,m,lambda_n,alpha_nm,w_nm")?;
    let big_n = tables.truncation();
    for n in 0..=big_n {
        for m in 0..=(big_n - n) {
            writeln!(
                out,
                "{n},{m},{},{},{}",
                num(tables.lambda(n)),
                num(tables.alpha(n, m)),
                num(tables.w(n, m))
            )?;
        }
    }
    Ok(())
}

pub fn write_trajectory<T: Scalar, W: Write>(traj: &[ModeCoefficients<T>], mut out: W) -> io::Result<()> {
    let width = traj.first().map_or(0, |c| c.b.len());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..width).map(|n| format!("b{n}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for c in traj {
        let row: Vec<String> = std::iter::once(num(c.t)).chain(c.b.iter().map(|v| num(*v))).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_trajectory<T: Scalar, R: BufRead>(input: R) -> io::Result<Vec<ModeCoefficients<T>>> {
    let bad = |line: usize, msg: String| io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"));
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file".into()))??;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols.iter().skip(1).enumerate().any(|(n, c)| *c != format!("b{n}")) {
        return Err(bad(1, format!("unexpected header {header:?}")));
    }
    let mut traj = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().map(T::lit))
            .collect::<Result<Vec<T>, _>>()
            .map_err(|e| bad(i + 2, e.to_string()))?;
        if vals.len() != cols.len() {
            return Err(bad(i + 2, format!("{} fields, expected {}", vals.len(), cols.len())));
        }
        traj.push(ModeCoefficients::new(vals[0], vals[1..].to_vec()).map_err(|e| bad(i + 2, e.to_string()))?);
    }
    Ok(traj)
}

/// Two columns `r,g`.
pub fn write_profile<T: Scalar, W: Write>(r: &[T], g: &[T], mut out: W) -> io::Result<()> {
    writeln!(out, "r,g")?;
    for (x, y) in r.iter().zip(g) {
        writeln!(out, "{},{}", num(*x), num(*y))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_round_trip_is_lossless() {
        let traj = vec![
            ModeCoefficients::new(0.0, vec![0.0, 0.0, 0.1 / 3.0]).unwrap(),
            ModeCoefficients::new(0.5, vec![0.0, 0.0, std::f64::consts::PI * 1e-9]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_trajectory(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,b0,b1,b2\n"));
        let back: Vec<ModeCoefficients<f64>> = read_trajectory(&buf[..]).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn malformed_rows_report_line() {
        let err = read_trajectory::<f64, _>(&b"t,b0\n0,1\n1,x\n"[..]).unwrap_err();
        assert!(err.to_string().contains("line 3"));
        assert!(read_trajectory::<f64, _>(&b"time,b0\n"[..]).is_err());
    }
}
