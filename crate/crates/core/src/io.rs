//! Text formats for matrices and tables.
//!
//! Floats are written in Rust's shortest round-trip form with a `.` decimal
//! separator, so reloading a file reproduces every value bit for bit.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// `a+bi` / `a-bi`.
pub fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", z.re, sign, z.im.abs())
}

pub fn parse_f64(text: &str) -> Result<f64> {
    let t = text.trim();
    t.parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {t:?}")))
}

/// Accepts `a`, `a+bi`, `a-bi`, `bi`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_f64(t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_f64(&body[..i])?, parse_f64(&body[i..])?),
        None => (0.0, parse_f64(body)?),
    };
    Ok(Complex64::new(re, im))
}

/// One matrix row per CSV line, no header. Purely real matrices are written as
/// plain numbers, anything else as `a+bi` cells.
pub fn matrix_to_csv(m: &Array2<Complex64>) -> Result<String> {
    let real = m.iter().all(|z| z.im == 0.0);
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in m.rows() {
        w.write_record(
            row.iter()
                .map(|&z| if real { fmt_f64(z.re) } else { fmt_complex(z) }),
        )?;
    }
    into_string(w)
}

pub fn matrix_from_csv(text: &str) -> Result<Array2<Complex64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut cols = None;
    let mut data = Vec::new();
    let mut rows = 0;
    for record in r.records() {
        let record = record?;
        if cols.is_some_and(|c| c != record.len()) {
            return Err(Error::Parse(format!("ragged matrix row {}", rows + 1)));
        }
        cols = Some(record.len());
        for cell in record.iter() {
            data.push(parse_complex(cell)?);
        }
        rows += 1;
    }
    shape(rows, cols.unwrap_or(0), data)
}

/// Nested arrays of `[re, im]` pairs.
pub fn matrix_to_json(m: &Array2<Complex64>) -> String {
    let rows: Vec<Vec<[f64; 2]>> = m
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect();
    let mut out = serde_json::to_string(&rows).expect("finite matrix serializes");
    out.push('\n');
    out
}

pub fn matrix_from_json(text: &str) -> Result<Array2<Complex64>> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    let n = rows.len();
    let data = rows
        .into_iter()
        .flatten()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    shape(n, cols, data)
}

fn shape(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Array2<Complex64>> {
    if rows == 0 || cols == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Parse(e.to_string()))
}

/// Header plus rows of already formatted cells.
pub fn table_to_csv<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn complex_cells() {
        assert_eq!(fmt_complex(Complex64::new(0.5, -0.25)), "0.5-0.25i");
        assert_eq!(fmt_complex(Complex64::new(-1.0, 0.0)), "-1.0+0.0i");
        assert_eq!(
            parse_complex("0.5-0.25i").unwrap(),
            Complex64::new(0.5, -0.25)
        );
        assert_eq!(parse_complex("-3").unwrap(), Complex64::new(-3.0, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(
            parse_complex("1e-3+2.5E+2i").unwrap(),
            Complex64::new(1e-3, 250.0)
        );
        assert!(parse_complex("x+yi").is_err());
    }

    #[test]
    fn real_matrix_csv_is_plain() {
        let m = array![[Complex64::new(0.5, 0.0), Complex64::new(-1.0 / 3.0, 0.0)]];
        let text = matrix_to_csv(&m).unwrap();
        assert_eq!(text, "0.5,-0.3333333333333333\n");
        assert_eq!(matrix_from_csv(&text).unwrap(), m);
        assert!(matrix_from_csv("1,2\n3\n").is_err());
        assert!(matrix_from_csv("").is_err());
        assert!(matrix_from_json("[[[1,0]],[]]").is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e300..1e300f64,
            -1.0..1.0f64,
            Just(0.0),
            Just(-0.0),
            Just(1e-310)
        ]
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip_bit_exact(
            cells in proptest::collection::vec((finite(), finite()), 6),
            real in any::<bool>(),
        ) {
            let data: Vec<Complex64> = cells
                .into_iter()
                .map(|(re, im)| Complex64::new(re, if real { 0.0 } else { im }))
                .collect();
            let m = Array2::from_shape_vec((2, 3), data).unwrap();
            let back = matrix_from_csv(&matrix_to_csv(&m).unwrap()).unwrap();
            prop_assert!(back.iter().zip(&m).all(|(a, b)| a.re.to_bits() == b.re.to_bits()
                && a.im.abs() == b.im.abs()));
            let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
