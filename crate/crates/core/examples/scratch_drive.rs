// scratch driver used during development
fn sos_probe() {
    use qmcert_core::parse::parse;
    use qmcert_core::sos::{sos_decompose, SosConfig, SosOutcome, verify_sos};
    let v = vec!["x".to_string()];
    let fh = parse(
        "3/2 + x - 32*x^2*(1 - x^2)^13",
        &v,
    )
    .unwrap();
    let t0 = std::time::Instant::now();
    match sos_decompose(&fh, &SosConfig::default()) {
        SosOutcome::Sos(d) => println!("probe: SOS ok ({} squares) in {:?}, verified {}", d.squares.len(), t0.elapsed(), verify_sos(&fh, &d)),
        other => println!("probe: {other:?} in {:?}", t0.elapsed()),
    }
}

fn main() {
    sos_probe();
    use qmcert_core::parse::parse;
    use qmcert_core::putinar::{certify, verify_certificate, CertifyOptions, QuadraticModule, Verdict};
    use std::time::Instant;

    let v = vec!["x".to_string()];
    let g1 = parse("x*(x - 1/2)*(x - 1)^2*(x - 2)", &v).unwrap();
    let g2 = parse("0 - x*(x - 1)*(x - 2)", &v).unwrap();
    let f = parse(
        "0 - 26*x^7 + 13*x^6 + 87*x^5 + 49*x^4 - 464*x^3 + 1512*x^2 - 2211*x + 1050",
        &v,
    )
    .unwrap();
    let q = QuadraticModule::new(1, vec![g1, g2]);
    let opts = CertifyOptions::default();
    let t0 = Instant::now();
    match certify(&q, &f, &opts) {
        Ok(cert) => {
            println!("sec6 certificate in {:?}", t0.elapsed());
            println!("  verdict: {:?}", verify_certificate(&q, &f, &cert) == Verdict::Valid);
            println!("  sigma_{{s+1}} zero: {}", cert.sigma[3].is_zero());
            println!("  total degree: {}", cert.total_degree(&q));
            for (i, s) in cert.sigma.iter().enumerate() {
                println!(
                    "  sigma_{i}: {} squares, max square degree {}",
                    s.squares.len(),
                    s.max_square_degree()
                );
            }
        }
        Err(e) => println!("sec6 FAILED in {:?}: {e}", t0.elapsed()),
    }

    // Table-2 instance k=13, eps=1/2
    let t0 = Instant::now();
    let g = parse("(1 - x^2)^13", &v).unwrap();
    let f2 = parse("3/2 + x", &v).unwrap();
    let q2 = QuadraticModule::new(1, vec![g]);
    match certify(&q2, &f2, &opts) {
        Ok(cert) => {
            println!("table2 k=13 in {:?}", t0.elapsed());
            println!("  verdict: {:?}", verify_certificate(&q2, &f2, &cert) == Verdict::Valid);
            println!("  total degree: {} (2k+4 = 30)", cert.total_degree(&q2));
        }
        Err(e) => println!("table2 FAILED in {:?}: {e}", t0.elapsed()),
    }
}
