//! Map export text format:
//!
//! ```text
//! format biharmonic-map
//! side disk|annulus
//! band <N>
//! radius <R>
//! x <n> <re a_0> <im a_0> ...      (2 or 4 coefficients per mode)
//! y <n> ...
//! ```

use num_complex::Complex64;

use super::{BiharmonicMap, Side};
use crate::error::{Error, Result};
use crate::textio::{RecordReader, RecordWriter};

pub fn to_text(map: &BiharmonicMap) -> String {
    let mut w = RecordWriter::new("biharmonic-map");
    w.text("side", map.side().name());
    w.int("band", map.band() as i64);
    w.float("radius", map.outer_radius());
    let n = map.band() as i64;
    for k in -n..=n {
        for (c, key) in ["x", "y"].iter().enumerate() {
            let vals: Vec<f64> = map.mode(k)[c].iter().flat_map(|z| [z.re, z.im]).collect();
            w.row(key, k, &vals);
        }
    }
    w.finish()
}

pub fn from_text(text: &str) -> Result<BiharmonicMap> {
    let mut r = RecordReader::new(text, "biharmonic-map")?;
    let l = r.expect("side")?;
    l.expect_len(1)?;
    let side = match l.str(0)? {
        "disk" => Side::Disk,
        "annulus" => Side::Annulus,
        other => {
            return Err(Error::Parse {
                line: l.number,
                column: 6,
                message: format!("unknown side `{other}`"),
            })
        }
    };
    let l = r.expect("band")?;
    l.expect_len(1)?;
    let band = l.i64(0)?;
    if band <= 0 {
        return Err(Error::Parse {
            line: l.number,
            column: 6,
            message: "band limit must be positive".into(),
        });
    }
    let l = r.expect("radius")?;
    l.expect_len(1)?;
    let radius = l.f64(0)?;
    let per = side.basis_len();
    let mut coeffs = Vec::new();
    for k in -band..=band {
        let mut pair: [Vec<Complex64>; 2] = [Vec::new(), Vec::new()];
        for (c, key) in ["x", "y"].iter().enumerate() {
            let l = r.expect(key)?;
            l.expect_len(1 + 2 * per)?;
            if l.i64(0)? != k {
                return Err(Error::Parse {
                    line: l.number,
                    column: 3,
                    message: format!("expected mode {k}"),
                });
            }
            for j in 0..per {
                pair[c].push(Complex64::new(l.f64(1 + 2 * j)?, l.f64(2 + 2 * j)?));
            }
        }
        coeffs.push(pair);
    }
    r.finish()?;
    Ok(BiharmonicMap::from_parts(side, band as usize, radius, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour2d::Contour;
    use crate::flatten::{solve_annulus_extension, solve_disk_extension};

    #[test]
    fn round_trip_both_sides() {
        let c = Contour::perturbed_circle(&[(3, 0.1)], 6);
        let d = solve_disk_extension(&c);
        let back = from_text(&to_text(&d)).unwrap();
        assert_eq!(back.evaluate(0.3, 1.0).unwrap(), d.evaluate(0.3, 1.0).unwrap());
        let a = solve_annulus_extension(&c, 3.0).unwrap();
        let back = from_text(&to_text(&a)).unwrap();
        assert_eq!(back.evaluate(2.0, 1.0).unwrap(), a.evaluate(2.0, 1.0).unwrap());
        assert_eq!(to_text(&back), to_text(&a));
    }
}
