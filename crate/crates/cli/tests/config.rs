use cheeger_flow::Scenario;
use cheeger_flow_cli::{parse_config, ConfigError, Verification};

fn err(text: &str) -> ConfigError {
    parse_config(text).expect_err("config should be rejected")
}

#[test]
fn minimal_config_takes_defaults() {
    let c = parse_config("[scenario]\nname = \"round_sphere\"\nr = 1.0\n").unwrap();
    assert_eq!(c.scenario.name, Scenario::RoundSphere);
    assert_eq!(c.scenario.grid_n, 256);
    assert_eq!(c.scenario.flow.cfl_factor, 0.2);
    assert_eq!(c.scenario.flow.t_end, 0.25);
    assert_eq!(c.verify, Verification::ALL.to_vec());
    assert!(c.emit_csv && c.emit_json);
    assert_eq!(c.seed, 0);
}

#[test]
fn out_of_range_cfl_names_key_and_range() {
    let e = err("[scenario]\nname = \"round_sphere\"\n[flow]\ncfl_factor = 0.9\n");
    let msg = e.to_string();
    assert!(
        msg.contains("flow.cfl_factor") && msg.contains("(0, 0.5]"),
        "{msg}"
    );
}

#[test]
fn coarse_grid_is_rejected() {
    let msg = err("[scenario]\nname = \"round_sphere\"\ngrid_n = 8\n").to_string();
    assert!(
        msg.contains("scenario.grid_n") && msg.contains("[16, ∞)"),
        "{msg}"
    );
}

#[test]
fn scenario_parameter_ranges() {
    let msg = err("[scenario]\nname = \"dumbbell\"\nneck = 1.5\n").to_string();
    assert!(
        msg.contains("scenario.neck") && msg.contains("(0, 1)"),
        "{msg}"
    );
    let msg = err("[scenario]\nname = \"bump_sphere\"\nw = 0.01\n").to_string();
    assert!(
        msg.contains("scenario.w") && msg.contains("[0.1, 1]"),
        "{msg}"
    );
}

#[test]
fn unknown_names_are_rejected() {
    let msg = err("[scenario]\nname = \"round_sphere\"\nradius = 2.0\n").to_string();
    assert!(
        msg.contains("scenario.radius") && msg.contains("accepted: name, grid_n, r"),
        "{msg}"
    );
    let msg = err("[scenario]\nname = \"torus\"\n").to_string();
    assert!(msg.contains("torus") && msg.contains("dumbbell"), "{msg}");
    let msg =
        err("[scenario]\nname = \"round_sphere\"\n[verify]\nchecks = [\"area_law\", \"vibes\"]\n")
            .to_string();
    assert!(
        msg.contains("vibes") && msg.contains("convergence"),
        "{msg}"
    );
    let msg = err("[scenario]\nname = \"round_sphere\"\n[plot]\nx = 1\n").to_string();
    assert!(msg.contains("[plot]"), "{msg}");
    assert!(matches!(
        err("[flow]\nt_end = 0.1\n"),
        ConfigError::Missing(_)
    ));
}

#[test]
fn type_mismatches_name_the_key() {
    let msg = err("[scenario]\nname = \"round_sphere\"\n[flow]\nt_end = \"soon\"\n").to_string();
    assert!(
        msg.contains("flow.t_end") && msg.contains("number"),
        "{msg}"
    );
    let msg = err("[scenario]\nname = \"round_sphere\"\n[output]\ncsv = 1\n").to_string();
    assert!(msg.contains("output.csv"), "{msg}");
    let msg = err("[scenario]\nname = \"round_sphere\"\n[verify]\nseed = -3\n").to_string();
    assert!(msg.contains("verify.seed"), "{msg}");
    assert!(matches!(err("[scenario\n"), ConfigError::Syntax(_)));
}

#[test]
fn full_dumbbell_config_round_trips() {
    let text = r#"
[scenario]
name = "dumbbell"
grid_n = 128
neck = 0.35
w = 0.55

[flow]
cfl_factor = 0.15
dt_min = 1e-13
dt_max = 0.005
t_end = 0.12
min_area_fraction = 0.1
max_curvature = 5000.0

[verify]
checks = ["papasoglu", "area_law", "residual_12b"]
seed = 42
area_law_tol = 2e-6
residual_tol = 0.01
monotonicity_tol = 1e-7
stationarity_tol = 0.05

[output]
dir = "runs/dumbbell"
csv = false
json = true
"#;
    let c = parse_config(text).unwrap();
    assert_eq!(
        c.verify,
        vec![
            Verification::AreaLaw,
            Verification::Residual12b,
            Verification::Papasoglu
        ]
    );
    assert_eq!(c.scenario.parameters["neck"], 0.35);
    let again = parse_config(&c.to_toml()).unwrap();
    assert_eq!(again, c);
    assert_eq!(again.output_dir, c.output_dir);
    assert_eq!((again.emit_csv, again.emit_json), (false, true));
    assert_eq!(again.to_toml(), c.to_toml());
}
