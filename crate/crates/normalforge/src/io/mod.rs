//! Bit-exact file formats: PFM float images, 16-bit PNG depth, 8-bit normal
//! visualization, intrinsics JSON, report JSON/CSV, and the dataset layout.

pub mod dataset;
pub mod intrinsics;
pub mod pfm;
pub mod png;
pub mod report;

pub use intrinsics::{read_intrinsics_json, write_intrinsics_json};
pub use pfm::{
    read_pfm_normals, read_pfm_scalar, write_pfm_normals, write_pfm_scalar, PfmHeader,
};
pub use png::{encode_normal_png, read_png16_depth, write_normal_png, write_png16_depth};
pub use report::{report_from_json, report_to_csv, report_to_json, write_report, ReportFormat};
