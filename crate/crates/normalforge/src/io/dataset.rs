//! On-disk dataset layout: `<out>/<frame>_depth.pfm`, `<frame>_gt.pfm`
//! (3-channel), `<frame>_pose.json`, plus one `intrinsics.json` per dataset.

use std::path::{Path, PathBuf};

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::image::{DepthImage, NormalMap};
use crate::io::intrinsics::{read_intrinsics_json, write_intrinsics_json};
use crate::io::pfm::{read_pfm_normals, read_pfm_scalar, write_pfm_normals, write_pfm_scalar};
use crate::synth::Pose;

/// Zero-padded frame stem, e.g. `frame_0007`.
pub fn frame_stem(index: usize) -> String {
    format!("frame_{index:04}")
}

pub fn depth_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}_depth.pfm"))
}

pub fn gt_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}_gt.pfm"))
}

pub fn pose_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}_pose.json"))
}

pub fn intrinsics_path(dir: &Path) -> PathBuf {
    dir.join("intrinsics.json")
}

pub fn write_frame(
    dir: &Path,
    stem: &str,
    depth: &DepthImage,
    gt: &NormalMap,
    pose: &Pose,
) -> Result<()> {
    write_pfm_scalar(&depth_path(dir, stem), depth.grid())?;
    write_pfm_normals(&gt_path(dir, stem), gt)?;
    let path = pose_path(dir, stem);
    let mut text = serde_json::to_string_pretty(pose).expect("pose serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

pub fn read_frame(dir: &Path, stem: &str) -> Result<(DepthImage, NormalMap, Pose)> {
    let depth = DepthImage::new(read_pfm_scalar(&depth_path(dir, stem))?);
    let gt = read_pfm_normals(&gt_path(dir, stem))?;
    let path = pose_path(dir, stem);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let pose: Pose =
        serde_json::from_str(&text).map_err(|e| Error::format(&path, e.column() as u64, e.to_string()))?;
    Ok((depth, gt, pose))
}

pub fn write_dataset_intrinsics(dir: &Path, k: &CameraIntrinsics) -> Result<()> {
    write_intrinsics_json(&intrinsics_path(dir), k)
}

pub fn read_dataset_intrinsics(dir: &Path) -> Result<CameraIntrinsics> {
    read_intrinsics_json(&intrinsics_path(dir))
}

/// Frame stems present in a dataset directory, sorted.
pub fn list_frames(dir: &Path) -> Result<Vec<String>> {
    let mut stems = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix("_depth.pfm") {
            stems.push(stem.to_string());
        }
    }
    stems.sort();
    if stems.is_empty() {
        return Err(Error::invalid(format!(
            "no *_depth.pfm frames found in {}",
            dir.display()
        )));
    }
    Ok(stems)
}
