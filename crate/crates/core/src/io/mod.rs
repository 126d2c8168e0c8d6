//! File formats: binary STL meshes, JSON and CSV reports.

mod report;
mod stl;

pub use report::{to_json, write_csv, write_json_list, write_report, Document, SCHEMA_VERSION};
pub use stl::{decode_stl, encode_stl, header_text, read_stl, write_stl, HEADER_LEN, RECORD_LEN};
