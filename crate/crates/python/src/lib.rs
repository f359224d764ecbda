//! Python bindings: points, sticks, samplers, cluster labels, closed-form
//! measures and the experiment runner.

#[pyo3::pymodule]
mod hypersticks_py {
    use hypersticks::experiments::{run_experiment as run, ExperimentKind, ExperimentSpec};
    use hypersticks::geometry as geo;
    use hypersticks::percolation as perc;
    use hypersticks::process as proc_;
    use pyo3::exceptions::{PyRuntimeError, PyValueError};
    use pyo3::prelude::*;

    fn value_err(e: impl std::fmt::Display) -> PyErr {
        PyValueError::new_err(e.to_string())
    }

    /// A point in polar coordinates `(rho, theta)`.
    #[pyclass(frozen, skip_from_py_object, name = "HPoint")]
    #[derive(Clone, Copy)]
    pub struct HPoint(pub geo::HPoint);

    #[pymethods]
    impl HPoint {
        #[new]
        fn new(rho: f64, theta: f64) -> PyResult<Self> {
            geo::HPoint::try_new(rho, theta).map(HPoint).map_err(value_err)
        }

        #[getter]
        fn rho(&self) -> f64 {
            self.0.rho()
        }

        #[getter]
        fn theta(&self) -> f64 {
            self.0.theta()
        }

        /// Poincaré disc coordinates.
        fn to_disc(&self) -> (f64, f64) {
            let d = self.0.to_disc();
            (d.u, d.v)
        }

        fn __repr__(&self) -> String {
            format!("HPoint(rho={}, theta={})", self.0.rho(), self.0.theta())
        }
    }

    /// A stick `l_L(x, phi)`.
    #[pyclass(frozen, skip_from_py_object, name = "Stick")]
    #[derive(Clone, Copy)]
    pub struct Stick(pub geo::Stick);

    #[pymethods]
    impl Stick {
        #[new]
        fn new(center: PyRef<'_, HPoint>, phi: f64, length: f64) -> PyResult<Self> {
            geo::make_stick(center.0, phi, length).map(Stick).map_err(value_err)
        }

        #[getter]
        fn center(&self) -> HPoint {
            HPoint(self.0.center())
        }

        #[getter]
        fn phi(&self) -> f64 {
            self.0.phi()
        }

        #[getter]
        fn length(&self) -> f64 {
            self.0.length()
        }

        fn endpoints(&self) -> (HPoint, HPoint) {
            let e = self.0.endpoints();
            (HPoint(e.a), HPoint(e.b))
        }

        fn meets(&self, other: PyRef<'_, Stick>) -> bool {
            geo::sticks_meet(&self.0, &other.0)
        }

        /// `(rho_prime, varphi, r)` of the crossing with the ray at
        /// `ray_angle`, or `None`.
        #[pyo3(signature = (ray_angle = 0.0))]
        fn hit_triple(&self, ray_angle: f64) -> Option<(f64, f64, f64)> {
            geo::hit_triple(&self.0, ray_angle).map(|t| (t.rho_prime, t.varphi, t.r))
        }

        fn __repr__(&self) -> String {
            let c = self.0.center();
            format!(
                "Stick(center=({}, {}), phi={}, L={})",
                c.rho(),
                c.theta(),
                self.0.phi(),
                self.0.length()
            )
        }
    }

    #[pyfunction]
    fn dist(p: PyRef<'_, HPoint>, q: PyRef<'_, HPoint>) -> f64 {
        geo::dist(&p.0, &q.0)
    }

    #[pyfunction]
    fn ball_volume(rho: f64) -> f64 {
        geo::ball_volume(rho)
    }

    #[pyfunction]
    fn chord_distance(rho: f64, varphi: f64) -> f64 {
        geo::chord_distance(rho, varphi)
    }

    #[pyfunction]
    #[pyo3(signature = (rho_prime, varphi, r, length, ray_angle = 0.0))]
    fn stick_from_triple(rho_prime: f64, varphi: f64, r: f64, length: f64, ray_angle: f64) -> Stick {
        let t = geo::HitTriple { rho_prime, varphi, r };
        Stick(geo::stick_from_triple(&t, length, ray_angle))
    }

    /// `mu` of the box `[rho] x [phi] x [r]` of hitting triples.
    #[pyfunction]
    fn mu_box(rho: (f64, f64), phi: (f64, f64), r: (f64, f64), length: f64) -> PyResult<f64> {
        let b = proc_::TripleBox::new(rho, phi, r, length).map_err(value_err)?;
        Ok(proc_::mu_box(&b))
    }

    #[pyfunction]
    fn offspring_mean(lambda_: f64, length: f64) -> f64 {
        proc_::offspring_mean(lambda_, length)
    }

    #[pyfunction]
    fn embedding_success_prob(lambda_: f64, length: f64) -> f64 {
        proc_::embedding_success_prob(lambda_, length)
    }

    #[pyfunction]
    fn vacant_line_prob(lambda_: f64, length: f64, r: f64) -> f64 {
        proc_::vacant_line_prob(lambda_, length, r)
    }

    #[pyfunction]
    fn gw_extinction_probability(q: f64) -> f64 {
        perc::gw_extinction_probability(q)
    }

    /// Sticks of one realization with centre in `B(o, R + L/2)`, or meeting
    /// `B(o, R)` when `meeting_ball`.
    #[pyfunction]
    #[pyo3(signature = (lambda_, length, radius, seed, meeting_ball = false))]
    fn sample(
        py: Python<'_>,
        lambda_: f64,
        length: f64,
        radius: f64,
        seed: u64,
        meeting_ball: bool,
    ) -> PyResult<Vec<Stick>> {
        let c = proc_::ProcessConfig::new(lambda_, length, radius, seed).map_err(value_err)?;
        let s = py
            .detach(|| {
                if meeting_ball {
                    proc_::sample_meeting_ball(&c)
                } else {
                    proc_::sample_window(&c)
                }
            })
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(s.sticks.into_iter().map(Stick).collect())
    }

    fn unwrap(sticks: &[PyRef<'_, Stick>]) -> Vec<geo::Stick> {
        sticks.iter().map(|s| s.0).collect()
    }

    /// Cluster label of every stick, numbered by first appearance.
    #[pyfunction]
    fn cluster_labels(sticks: Vec<PyRef<'_, Stick>>) -> Vec<u32> {
        perc::cluster_sticks(&unwrap(&sticks)).labels
    }

    /// Number of clusters joining `B(o, r_in)` to distance `R`.
    #[pyfunction]
    fn crossing_clusters(sticks: Vec<PyRef<'_, Stick>>, r_in: f64, radius: f64) -> PyResult<usize> {
        let v = unwrap(&sticks);
        let l = v.first().map_or(1.0, |s| s.length());
        let c = proc_::ProcessConfig::new(1.0, l, radius, 0).map_err(value_err)?;
        let s = proc_::StickSample::new(c, proc_::SampleRegion::Window, v);
        let lab = perc::build_clusters(&s);
        Ok(perc::two_arm_count(&s, &lab, r_in, radius))
    }

    /// Runs an experiment given as `key=value` text (must include `kind`)
    /// and returns the record as JSON lines.
    #[pyfunction]
    #[pyo3(signature = (spec, threads = None))]
    fn run_experiment(py: Python<'_>, spec: &str, threads: Option<usize>) -> PyResult<String> {
        let entries = hypersticks::experiments::parse_lines(spec).map_err(value_err)?;
        let kind = entries
            .iter()
            .find(|(k, _)| k == "kind")
            .ok_or_else(|| PyValueError::new_err("spec needs a kind line"))?
            .1
            .parse::<ExperimentKind>()
            .map_err(value_err)?;
        let mut s = ExperimentSpec::new(kind);
        for (k, v) in &entries {
            s.set(k, v).map_err(value_err)?;
        }
        let s = s.resolve().map_err(value_err)?;
        let rec = py.detach(|| run(&s, threads)).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let mut buf = Vec::new();
        rec.write_jsonl(&mut buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}
