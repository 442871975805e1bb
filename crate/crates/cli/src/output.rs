use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Float with 9 significant digits, printed in its shortest form.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("valid float");
    format!("{rounded}")
}

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        fs::write(self.dir.join(name), s)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> std::io::Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        s.push('\n');
        fs::write(self.dir.join(name), s)
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn nine_digits() {
        assert_eq!(num(1.0 / 3.0), "0.333333333");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(123456789012.0), "123456789000");
    }
}
