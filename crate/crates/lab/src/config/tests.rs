use super::*;

const MINIMAL: &str = "[operator]\nfamily = log_ma\nn = 2\n\n[grid]\np = 1\ntorus_res = 8, 4\ns_res = 8\ntheta_res = 8\n";

fn line_of(err: ConfigError) -> usize {
    match err {
        ConfigError::At { line, .. } => line,
        other => panic!("expected a located error, got {other}"),
    }
}

#[test]
fn minimal_operator_block() {
    let c = RunConfig::parse(MINIMAL).unwrap();
    assert_eq!(c.operator, OperatorSpec::log_ma(2).unwrap());
    assert_eq!(c.chi, MatrixSpec::identity(2));
    assert_eq!(c.psi.expr, Expr::constant(0.0));
    assert_eq!(c.eps_schedule, vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5]);
}

#[test]
fn round_trip_is_identity() {
    let text = format!(
        "{MINIMAL}[chi]\nre = 1, 0.5, 0.5, 2\nim = 0, 0.25, -0.25, 0\n[psi]\nsolution = 0.01*cos(2*pi*x1) + 0.5*s*s\n\
         [phi]\nlower = 0\nupper = 1 - exp(-theta)\n[solver]\neps_schedule = 0.3, 0.03\n[run]\nseed = 17\n\
         [compare]\nfirst = a.csv\nsecond = b.csv\n"
    );
    let c = RunConfig::parse(&text).unwrap();
    let again = RunConfig::parse(&c.serialize()).unwrap();
    assert_eq!(c, again);
    assert_eq!(c.serialize(), again.serialize());
    let q = RunConfig::parse(&MINIMAL.replace("log_ma", "hessian_quotient\nk = 2\nl = 1")).unwrap();
    assert_eq!(RunConfig::parse(&q.serialize()).unwrap(), q);
}

#[test]
fn rejections_carry_line_numbers() {
    assert_eq!(line_of(RunConfig::parse("[operator]\nfamily = log_ma\nfamily = log_ma\n").unwrap_err()), 3);
    assert_eq!(line_of(RunConfig::parse(&format!("{MINIMAL}[nonsense]\n")).unwrap_err()), 10);
    assert_eq!(line_of(RunConfig::parse(&format!("{MINIMAL}[run]\nseeds = 3\n")).unwrap_err()), 11);
    assert_eq!(line_of(RunConfig::parse(&format!("{MINIMAL}[grid]\n")).unwrap_err()), 10);
    assert_eq!(line_of(RunConfig::parse("n = 2\n").unwrap_err()), 1);
    assert_eq!(line_of(RunConfig::parse(&format!("{MINIMAL}[psi]\nexpr = s / 2\n")).unwrap_err()), 11);
    assert_eq!(line_of(RunConfig::parse(&format!("{MINIMAL}[psi]\nexpr = z\n")).unwrap_err()), 11);
}

#[test]
fn k_above_n_is_rejected() {
    let text = MINIMAL.replace("family = log_ma\nn = 2", "family = sigma_k_root\nn = 3\nk = 5").replace("p = 1", "p = 2");
    assert_eq!(line_of(RunConfig::parse(&text).unwrap_err()), 4);
}

#[test]
fn required_sections() {
    assert!(matches!(RunConfig::parse(""), Err(ConfigError::Invalid(_))));
    assert!(RunConfig::parse("[operator]\nfamily = log_ma\nn = 2\n").is_err());
    assert!(RunConfig::parse(&MINIMAL.replace("[operator]\nfamily = log_ma\nn = 2\n", "")).is_err());
    // n must match the grid
    assert!(RunConfig::parse(&MINIMAL.replace("n = 2", "n = 3")).is_err());
    // ω must be positive definite
    assert!(RunConfig::parse(&format!("{MINIMAL}[omega]\nre = 1, 0, 0, -1\n")).is_err());
}
