pub mod filtering;
pub mod learn;
pub mod sampling;
pub mod spectrum;
pub mod stochastic;
pub mod timevertex;

use gspkit::io::fmt_f64;

/// Two-column plot table with a header row.
pub fn two_column_csv(header: &str, rows: impl Iterator<Item = (f64, f64)>) -> String {
    let mut text = format!("{header}\n");
    for (a, b) in rows {
        text.push_str(&format!("{},{}\n", fmt_f64(a), fmt_f64(b)));
    }
    text
}

/// Indexed complex table (`index,re,im`).
pub fn complex_csv(values: impl Iterator<Item = num_complex::Complex64>) -> String {
    let mut text = String::from("index,re,im\n");
    for (i, z) in values.enumerate() {
        text.push_str(&format!("{i},{},{}\n", fmt_f64(z.re), fmt_f64(z.im)));
    }
    text
}
