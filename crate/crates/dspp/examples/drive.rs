use dspp::hazard_models::{HazardModelSpec, TimeKernel};
use dspp::malliavin_rec::survival_thm2;
use dspp::mc_oracle::{mc_survival, McConfig};
use dspp::survival_bell::survival_thm1;

fn main() {
    let model = HazardModelSpec::Cmy {
        c: 1.0,
        m: 2.0,
        y: 0.5,
        sigma_fn: TimeKernel::Constant(1.0),
        lambda_t: 0.6,
    };
    let n = 3;
    let thm1 = survival_thm1(&model, 0.0, 1.0, n).unwrap();
    let thm2 = survival_thm2(&model, 0.0, 1.0, n, model.accumulated_lambda()).unwrap();
    let mc_model = HazardModelSpec::Cmy {
        c: 1.0,
        m: 2.0,
        y: 0.0,
        sigma_fn: TimeKernel::Constant(1.0),
        lambda_t: 0.6,
    };
    let t1 = survival_thm1(&mc_model, 0.0, 1.0, n).unwrap();
    let config = McConfig { n_paths: 100_000, seed: 11, ..McConfig::default() };
    let mc = mc_survival(&mc_model, 0.0, 1.0, n, mc_model.accumulated_lambda(), &config).unwrap();
    println!("thm1 (Y=0.5) = {:.12}", thm1.probability);
    println!("thm2 (Y=0.5) = {:.12}", thm2.probability);
    println!("thm1 (Y=0)   = {:.12}", t1.probability);
    println!("mc   (Y=0)   = {:.12} +- {:.2e}", mc.mean, mc.std_error);
    let rel = (thm1.probability - thm2.probability).abs() / thm1.probability;
    let z = (t1.probability - mc.mean).abs() / mc.std_error;
    println!("thm1-thm2 rel diff = {rel:.3e}; mc z-score = {z:.2}");
    assert!(rel < 1e-10 && z < 3.0, "route disagreement");
    println!("routes agree");
}
