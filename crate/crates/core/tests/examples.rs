macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                run_example().unwrap();
            }
        }
    };
}

example!(kernel_density);
example!(stable_sampler);
example!(drift_fixture);
example!(kernel_norms);
example!(simulate_paths);
example!(density_estimates);
example!(weak_rate);
example!(duhamel_residual);
example!(error_decomposition);
example!(singular_integrals);
example!(product_norm);
example!(config_run);
