//! Camera intrinsics as JSON: `{"fx":..,"fy":..,"u0":..,"v0":..}` with an
//! optional `t_c`; unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntrinsicsFile {
    fx: f64,
    fy: f64,
    u0: f64,
    v0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_c: Option<f64>,
}

pub fn read_intrinsics_json(path: &Path) -> Result<CameraIntrinsics> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed: IntrinsicsFile = serde_json::from_str(&text)
        .map_err(|e| Error::format(path, e.column() as u64, e.to_string()))?;
    CameraIntrinsics::with_baseline(parsed.fx, parsed.fy, parsed.u0, parsed.v0, parsed.t_c)
        .map_err(|e| Error::format(path, 0, e.to_string()))
}

pub fn write_intrinsics_json(path: &Path, k: &CameraIntrinsics) -> Result<()> {
    let file = IntrinsicsFile {
        fx: k.fx,
        fy: k.fy,
        u0: k.u0,
        v0: k.v0,
        t_c: k.t_c,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("intrinsics serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("normalforge_intrinsics_test");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn mono_and_stereo() {
        let path = tmp("mono.json");
        std::fs::write(&path, r#"{"fx":500,"fy":500,"u0":320,"v0":240}"#).unwrap();
        let k = read_intrinsics_json(&path).unwrap();
        assert_eq!((k.fx, k.fy, k.u0, k.v0, k.t_c), (500.0, 500.0, 320.0, 240.0, None));

        std::fs::write(&path, r#"{"fx":500,"fy":500,"u0":320,"v0":240,"t_c":0.1}"#).unwrap();
        let k = read_intrinsics_json(&path).unwrap();
        assert_eq!(k.t_c, Some(0.1));
    }

    #[test]
    fn roundtrip() {
        let k = CameraIntrinsics::with_baseline(525.5, 526.0, 319.75, 239.5, Some(0.12)).unwrap();
        let path = tmp("rt.json");
        write_intrinsics_json(&path, &k).unwrap();
        assert_eq!(read_intrinsics_json(&path).unwrap(), k);
    }

    #[test]
    fn errors_name_the_field() {
        let path = tmp("bad.json");
        std::fs::write(&path, r#"{"fx":500,"fy":500,"u0":320}"#).unwrap();
        let err = read_intrinsics_json(&path).unwrap_err().to_string();
        assert!(err.contains("v0"), "{err}");

        std::fs::write(&path, r#"{"fx":-1,"fy":500,"u0":320,"v0":240}"#).unwrap();
        let err = read_intrinsics_json(&path).unwrap_err().to_string();
        assert!(err.contains("fx"), "{err}");

        std::fs::write(&path, r#"{"fx":500,"fy":500,"u0":320,"v0":240,"zoom":2}"#).unwrap();
        let err = read_intrinsics_json(&path).unwrap_err().to_string();
        assert!(err.contains("zoom"), "{err}");

        std::fs::write(&path, r#"{"fx":"wide","fy":500,"u0":320,"v0":240}"#).unwrap();
        assert!(read_intrinsics_json(&path).is_err());
    }
}
