use chdg_cli::config::{parse_config, parse_number, MeshSpec, Method, RunConfig, Solver};
use chdg::solvers;

fn pairs(text: &str) -> Vec<(String, String)> {
    parse_config(text).unwrap()
}

fn err(text: &str) -> String {
    format!("{:#}", RunConfig::from_pairs(&pairs(text)).unwrap_err())
}

#[test]
fn numbers_accept_pi_products_and_quotients() {
    assert_eq!(parse_number("1/16").unwrap(), 0.0625);
    assert!((parse_number("15*pi").unwrap() - 15.0 * std::f64::consts::PI).abs() < 1e-14);
    assert!((parse_number("2 * pi / 3").unwrap() - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    assert!(parse_number("").is_err());
    assert!(parse_number("1/0").is_err());
    assert!(parse_number("pie").is_err());
}

#[test]
fn comments_blank_lines_and_overrides() {
    let p = pairs("# header\n\npreset = pw-hom-1  # trailing\nmethod=hdg\nmethod = chdg\n");
    let cfg = RunConfig::from_pairs(&p).unwrap();
    assert_eq!(cfg.method, Method::Chdg);
    assert_eq!(cfg.mesh, MeshSpec::Square { n: 16 });
    assert!(parse_config("no equals sign").is_err());
}

#[test]
fn hdg_fixed_point_is_rejected() {
    let e = err("preset = pw-hom-1\nmethod = hdg\nsolver = fixed_point");
    assert!(e.contains("fixed_point") && e.contains("chdg"), "{e}");
}

#[test]
fn dg_is_direct_only() {
    let e = err("preset = pw-hom-1\nmethod = dg\nsolver = gmres");
    assert!(e.contains("direct"), "{e}");
    assert!(RunConfig::from_pairs(&pairs("preset = pw-hom-1\nmethod = dg")).is_ok());
}

#[test]
fn restart_only_with_gmres() {
    let e = err("preset = pw-hom-1\nsolver = cgnr\nrestart = on");
    assert!(e.contains("restart"), "{e}");
    let cfg = RunConfig::from_pairs(&pairs("preset = pw-hom-1\nsolver = gmres\nrestart = on")).unwrap();
    assert_eq!(cfg.restart, Some(10));
    let cfg = RunConfig::from_pairs(&pairs("preset = pw-hom-1\nsolver = gmres")).unwrap();
    assert_eq!(cfg.restart, None);
}

#[test]
fn unknown_keys_and_values_are_named() {
    assert!(err("preset = pw-hom-1\nfluxx = upw").contains("fluxx"));
    assert!(err("preset = pw-hom-1\nflux = upx").contains("flux"));
    assert!(err("preset = nope").contains("nope"));
    assert!(err("benchmark = plane_wave\nn = 8").contains("omega"));
    assert!(err("preset = pw-hom-1\nn = 7").contains("even"));
    assert!(err("preset = pw-hom-1\nc2 = -1").contains("c2"));
}

#[test]
fn from_files_requirements() {
    assert!(err("benchmark = from_files\nmesh = square\nn = 4\nomega = 1").contains("MSH"));
    assert!(err("benchmark = from_files\nmesh = a.msh\nomega = 1").contains("coefficients"));
    assert!(err("benchmark = from_files\nmesh = a.msh\ncoefficients = c.txt").contains("omega"));
    assert!(err("preset = pw-hom-1\ncoefficients = c.txt").contains("from_files"));
}

#[test]
fn spectra_need_chdg() {
    assert!(err("preset = pw-hom-1\nmethod = hdg\nspectra = dense").contains("chdg"));
}

#[test]
fn resolved_config_round_trips() {
    let cfg = RunConfig::from_pairs(&pairs(
        "preset = cav-het-2\nsolver = gmres\nrestart = 7\nflux = sym2\nspectra = power\nseed = 9\nname = x",
    ))
    .unwrap();
    let again = RunConfig::from_pairs(&cfg.resolved()).unwrap();
    assert_eq!(again.resolved(), cfg.resolved());
    assert_eq!(again.solver, Solver::Iterative(solvers::Method::Gmres));
    assert_eq!(again.restart, Some(7));
}

#[test]
fn variants_swap_the_method_triple() {
    let base = RunConfig::from_pairs(&pairs("preset = pw-het-1\nsolver = gmres\nrestart = 5")).unwrap();
    let v = base.variant("hdg/sym0/cgnr").unwrap();
    assert_eq!(v.method, Method::Hdg);
    assert_eq!(v.restart, None);
    assert_eq!(v.name, "hdg-sym0-cgnr");
    assert_eq!(v.mesh, base.mesh);
    assert!(base.variant("hdg/sym0").is_err());
    assert!(base.variant("hdg/sym0/fixed_point").is_err());
}
