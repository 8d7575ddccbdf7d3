//! Plain-text row formats shared by episode logs and datasets.

use std::io::Read;

use crate::error::{Error, Result};
use crate::types::{Position3, Wrench};

pub const SAMPLE_HEADER: [&str; 10] = ["t", "x", "y", "z", "fx", "fy", "fz", "mx", "my", "mz"];

/// Formats with Rust's shortest round-trip float representation, which is
/// locale-independent and always uses a decimal point.
pub fn sample_fields(t: f64, p: Position3, w: Wrench) -> [String; 10] {
    let v = [t, p.x, p.y, p.z, w.fx, w.fy, w.fz, w.mx, w.my, w.mz];
    v.map(|x| x.to_string())
}

/// Reads rows written with [`SAMPLE_HEADER`].
pub fn read_samples<R: Read>(r: R) -> Result<Vec<(f64, Position3, Wrench)>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != SAMPLE_HEADER {
        return Err(Error::InsufficientData(format!(
            "unexpected sample header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let mut v = [0.0; 10];
        for (i, field) in row.iter().enumerate().take(10) {
            v[i] = field
                .parse()
                .map_err(|_| Error::InsufficientData(format!("bad number {field:?}")))?;
        }
        out.push((
            v[0],
            Position3::new(v[1], v[2], v[3]),
            Wrench::from_array([v[4], v[5], v[6], v[7], v[8], v[9]]),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    proptest::proptest! {
        #[test]
        fn sample_rows_round_trip(
            t in 0.0f64..1e4,
            p in proptest::array::uniform3(-1e4f64..1e4),
            w in proptest::array::uniform6(-1e3f64..1e3),
        ) {
            let mut buf = Vec::new();
            {
                let mut wr = csv::Writer::from_writer(&mut buf);
                wr.write_record(SAMPLE_HEADER).unwrap();
                wr.write_record(sample_fields(t, Position3::from_array(p), Wrench::from_array(w))).unwrap();
            }
            let rows = read_samples(buf.as_slice()).unwrap();
            let (t2, p2, w2) = rows[0];
            proptest::prop_assert!((t2 - t).abs() <= 1e-9);
            proptest::prop_assert!((p2 - Position3::from_array(p)).norm() <= 1e-9);
            proptest::prop_assert_eq!(w2, Wrench::from_array(w));
        }
    }
}
