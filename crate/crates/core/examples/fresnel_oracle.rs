//! Check the closed-form far field against direct quadrature of the Fresnel
//! integral, in and out of the far-field regime.

use subrayleigh::config::{OracleSettings, ScanConfig, Scenario};
use subrayleigh::scan::run_oracle_check;

fn main() -> subrayleigh::Result<()> {
    let far = ScanConfig {
        oracle: Some(OracleSettings::default()),
        ..ScanConfig::for_scenario(Scenario::ClassicalRect)
    };
    let near = ScanConfig {
        geometry: far.geometry.with_detector_distance(2e-3)?,
        scan_max: far.scan_max * 2e-3,
        ..far.clone()
    };
    for (label, config) in [("r_z = 1 m", far), ("r_z = 2 mm", near)] {
        let report = run_oracle_check(&config, 4)?;
        println!("{label}");
        println!(
            "  validity margin     {:.3}",
            report.fraunhofer_validity_margin
        );
        println!("  max |U| rel. error  {:.3e}", report.max_relative_error);
        println!(
            "  max phase error     {:.3e} rad",
            report.max_phase_difference_error
        );
        println!(
            "  raw |U| ratio       {:.6} (normalization {:?})",
            report.raw_magnitude_ratio, report.normalization
        );
        println!("  self change         {:.3e}", report.max_self_change);
        println!("  agrees              {}", report.agrees);
    }
    Ok(())
}
