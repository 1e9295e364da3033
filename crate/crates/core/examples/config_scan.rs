//! Drive a scan from a JSON configuration and write CSV and JSON output.

use std::path::Path;

use subrayleigh::config::parse_config;
use subrayleigh::output::{read_result, write_result, OutputFormat};
use subrayleigh::scan::run_scan_with_workers;

const CONFIG: &str = r#"{
  "scenario": "G2Coincident",
  "geometry": { "wavelength": "500nm", "source_distance": "0.1m", "detector_distance": "1m" },
  "aperture": { "height": "20um", "width": "20um" },
  "scan_min": "0.1mm",
  "scan_max": "50mm",
  "steps": 256
}"#;

fn main() -> subrayleigh::Result<()> {
    let config = parse_config(CONFIG, Path::new("inline"))?;
    let result = run_scan_with_workers(&config, 2)?;

    let dir = std::env::temp_dir().join("subrayleigh-example");
    std::fs::create_dir_all(&dir).map_err(|e| subrayleigh::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let csv = dir.join("scan.csv");
    let json = dir.join("scan.json");
    write_result(&result, OutputFormat::Csv, &csv)?;
    write_result(&result, OutputFormat::Json, &json)?;
    assert_eq!(read_result(&json)?, result);

    println!("frequency ratio {:.4}", result.metadata.frequency_ratio);
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
