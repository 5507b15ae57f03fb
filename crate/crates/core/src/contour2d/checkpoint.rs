//! Contour checkpoint text format:
//!
//! ```text
//! format contour
//! band <N>
//! time <t>
//! mode <n> <re x_n> <im x_n> <re y_n> <im y_n>     (one line per n = -N..=N)
//! ```

use num_complex::Complex64;

use super::contour::Contour;
use crate::error::{Error, Result};
use crate::textio::{RecordReader, RecordWriter};

pub fn to_text(contour: &Contour) -> String {
    let mut w = RecordWriter::new("contour");
    let n = contour.band() as i64;
    w.int("band", n);
    w.float("time", contour.time);
    for k in -n..=n {
        let c = contour.coeff(k);
        w.row("mode", k, &[c[0].re, c[0].im, c[1].re, c[1].im]);
    }
    w.finish()
}

pub fn from_text(text: &str) -> Result<Contour> {
    let mut r = RecordReader::new(text, "contour")?;
    let band_line = r.expect("band")?;
    band_line.expect_len(1)?;
    let band = band_line.i64(0)?;
    if band <= 0 {
        return Err(Error::Parse {
            line: band_line.number,
            column: 6,
            message: "band limit must be positive".into(),
        });
    }
    let time_line = r.expect("time")?;
    time_line.expect_len(1)?;
    let time = time_line.f64(0)?;
    let mut coeffs = Vec::with_capacity(2 * band as usize + 1);
    for k in -band..=band {
        let l = r.expect("mode")?;
        l.expect_len(5)?;
        if l.i64(0)? != k {
            return Err(Error::Parse {
                line: l.number,
                column: 6,
                message: format!("expected mode {k}, found {}", l.i64(0)?),
            });
        }
        coeffs.push([
            Complex64::new(l.f64(1)?, l.f64(2)?),
            Complex64::new(l.f64(3)?, l.f64(4)?),
        ]);
    }
    r.finish()?;
    let c = Contour::new(band as usize, coeffs, time)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let c = Contour::perturbed_circle(&[(2, 0.1), (7, 1.0 / 3.0e3)], 12).with_time(0.1 + 0.2);
        let back = from_text(&to_text(&c)).unwrap();
        assert_eq!(back.time.to_bits(), c.time.to_bits());
        for (a, b) in c.coeffs().iter().zip(back.coeffs()) {
            for k in 0..2 {
                assert_eq!(a[k].re.to_bits(), b[k].re.to_bits());
                assert_eq!(a[k].im.to_bits(), b[k].im.to_bits());
            }
        }
    }

    #[test]
    fn missing_mode_reports_location() {
        let text = "format contour\nband 1\ntime 0\nmode -1 0 0 0 0\nmode 0 0 0 0 0\n";
        match from_text(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
