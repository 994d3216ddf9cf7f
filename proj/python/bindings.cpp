#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fastreact/commands.hpp"
#include "fastreact/config.hpp"
#include "fastreact/errors.hpp"
#include "fastreact/galerkin.hpp"
#include "fastreact/integrator.hpp"
#include "fastreact/linear_manifold.hpp"
#include "fastreact/rates.hpp"
#include "fastreact/reduction.hpp"

namespace py = pybind11;
using namespace fastreact;

namespace {

py::array_t<double> to_array(std::span<const double> s) {
  py::array_t<double> a(static_cast<py::ssize_t>(s.size()));
  std::copy(s.begin(), s.end(), a.mutable_data());
  return a;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw ShapeError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

// Trajectory as a dict of arrays: t (S), u and v coefficients (S x N), running L-inf maxima.
py::dict trajectory_dict(const Trajectory& tr) {
  const std::size_t S = tr.samples.size();
  const std::size_t N = S ? tr.samples.front().u.size() : 0;
  py::array_t<double> t(static_cast<py::ssize_t>(S));
  py::array_t<double> u({static_cast<py::ssize_t>(S), static_cast<py::ssize_t>(N)});
  py::array_t<double> v({static_cast<py::ssize_t>(S), static_cast<py::ssize_t>(N)});
  auto tu = u.mutable_unchecked<2>();
  auto tv = v.mutable_unchecked<2>();
  for (std::size_t i = 0; i < S; ++i) {
    t.mutable_data()[i] = tr.samples[i].t;
    for (std::size_t k = 0; k < N; ++k) {
      tu(i, k) = tr.samples[i].u[k];
      tv(i, k) = tr.samples[i].v[k];
    }
  }
  py::dict d;
  d["t"] = t;
  d["u"] = u;
  d["v"] = v;
  d["linf_u1"] = to_array(tr.linf_u1);
  d["linf_u2"] = to_array(tr.linf_u2);
  return d;
}

SpectralField field_from(const Grid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& c) {
  auto v = from_array(c);
  if (v.size() != g.size()) throw ShapeError("coefficient array length must equal N");
  return SpectralField(g, std::move(v));
}

}  // namespace

PYBIND11_MODULE(_fastreact, m) {
  m.doc() = "Pseudospectral fast-slow reaction-diffusion laboratory";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<AssumptionError>(m, "AssumptionError", PyExc_RuntimeError);
  py::register_exception<DegenerateSplittingError>(m, "DegenerateSplittingError", PyExc_ValueError);
  py::register_exception<HorizonError>(m, "HorizonError", PyExc_ValueError);

  py::enum_<ModelKind>(m, "ModelKind").value("nonlinear", ModelKind::nonlinear).value("linear", ModelKind::linear);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def(py::init([](ModelKind kind, double d, double delta, double eps, double kappa, double a, double b,
                       double c, double L) {
             return ModelParams{d, delta, eps, kappa, a, b, c, L, kind};
           }),
           py::kw_only(), py::arg("kind") = ModelKind::nonlinear, py::arg("d") = 1.0, py::arg("delta") = 0.0,
           py::arg("eps") = 0.01, py::arg("kappa") = 1.0, py::arg("a") = 1.0, py::arg("b") = 1.0,
           py::arg("c") = 1.0, py::arg("L") = 3.141592653589793)
      .def_readwrite("kind", &ModelParams::kind)
      .def_readwrite("d", &ModelParams::d)
      .def_readwrite("delta", &ModelParams::delta)
      .def_readwrite("eps", &ModelParams::eps)
      .def_readwrite("kappa", &ModelParams::kappa)
      .def_readwrite("a", &ModelParams::a)
      .def_readwrite("b", &ModelParams::b)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("L", &ModelParams::L)
      .def("validate", &ModelParams::validate);

  py::class_<Grid>(m, "Grid")
      .def(py::init<double, std::size_t>(), py::arg("L"), py::arg("N"))
      .def_property_readonly("length", &Grid::length)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("nodes", [](const Grid& g) { return to_array(g.nodes()); })
      .def_property_readonly("mu", [](const Grid& g) { return to_array(g.mu()); })
      .def("forward", [](const Grid& g, const py::array_t<double>& x) {
        return to_array(cosine_transform(g, from_array(x), Direction::forward));
      })
      .def("inverse", [](const Grid& g, const py::array_t<double>& c) {
        return to_array(cosine_transform(g, from_array(c), Direction::inverse));
      });

  m.def("sobolev_norm",
        [](const Grid& g, const py::array_t<double>& c, int order) { return sobolev_norm(field_from(g, c), order); },
        py::arg("grid"), py::arg("coeffs"), py::arg("order"));
  m.def("square", [](const Grid& g, const py::array_t<double>& c) {
    return to_array(nonlinear_eval(field_from(g, c), [](double x) { return x * x; }).coeffs());
  }, "Dealiased pointwise square of a field given by its coefficients.");

  m.def("critical_u", &critical_u, py::arg("v"), py::arg("kappa"));

  m.def("simulate",
        [](const Grid& g, const py::array_t<double>& u0, const py::array_t<double>& v0, const ModelParams& p,
           double T, double dt, double sample_every) {
          const Trajectory tr = [&] {
            py::gil_scoped_release release;
            return simulate({field_from(g, u0), field_from(g, v0), 0.0}, p, T, dt, sample_every);
          }();
          return trajectory_dict(tr);
        },
        py::arg("grid"), py::arg("u0"), py::arg("v0"), py::arg("params"), py::arg("T"), py::arg("dt"),
        py::arg("sample_every"));

  m.def("solve_limit_system",
        [](const Grid& g, const py::array_t<double>& v0, const ModelParams& p, double T, double dt,
           double sample_every) {
          return trajectory_dict(solve_limit_system(field_from(g, v0), p, T, dt, sample_every));
        },
        py::arg("grid"), py::arg("v0"), py::arg("params"), py::arg("T"), py::arg("dt"), py::arg("sample_every"));

  py::class_<ModeSpectrum>(m, "ModeSpectrum")
      .def_readonly("k", &ModeSpectrum::k)
      .def_readonly("mu", &ModeSpectrum::mu)
      .def_readonly("Omega", &ModeSpectrum::Omega)
      .def_readonly("w_plus", &ModeSpectrum::w_plus)
      .def_readonly("w_minus", &ModeSpectrum::w_minus)
      .def_readonly("slow_rate", &ModeSpectrum::slow_rate)
      .def_readonly("fast_rate", &ModeSpectrum::fast_rate)
      .def_readonly("slope", &ModeSpectrum::slope)
      .def_readonly("regime_ok", &ModeSpectrum::regime_ok);
  m.def("mode_spectrum", &mode_spectrum, py::arg("params"), py::arg("k"));
  m.def("closed_form_solution",
        [](double u0, double v0, const ModelParams& p, std::size_t k, double t) {
          const ModeSolution s = closed_form_solution(u0, v0, p, k, t);
          return py::make_tuple(s.u, s.v, s.v_limit);
        },
        py::arg("u0"), py::arg("v0"), py::arg("params"), py::arg("k"), py::arg("t"));

  py::class_<LipschitzConstants>(m, "LipschitzConstants")
      .def(py::init([](double f, double phi, double psi) { return LipschitzConstants{f, phi, psi}; }),
           py::arg("f"), py::arg("phi") = 0.0, py::arg("psi") = 0.0)
      .def_readwrite("f", &LipschitzConstants::f)
      .def_readwrite("phi", &LipschitzConstants::phi)
      .def_readwrite("psi", &LipschitzConstants::psi);

  py::class_<SplittingParams>(m, "SplittingParams")
      .def_readonly("zeta_inv", &SplittingParams::zeta_inv)
      .def_readonly("k0", &SplittingParams::k0)
      .def_readonly("N_S", &SplittingParams::N_S)
      .def_readonly("N_F", &SplittingParams::N_F)
      .def_readonly("gap", &SplittingParams::gap)
      .def_readonly("eta", &SplittingParams::eta);
  m.def("splitting_parameters",
        [](double z, const ModelParams& p) { return splitting_parameters(z, p); }, py::arg("zeta_inv"),
        py::arg("params"));

  py::class_<GapReport>(m, "GapReport")
      .def_readonly("term1", &GapReport::term1)
      .def_readonly("term2", &GapReport::term2)
      .def_readonly("total", &GapReport::total)
      .def_readonly("parameter_inequality", &GapReport::parameter_inequality)
      .def_readonly("passes", &GapReport::passes);
  m.def("validate_assumptions",
        [](const ModelParams& p, const SplittingParams& s, const LipschitzConstants& l) {
          return validate_assumptions(p, s, l);
        },
        py::arg("params"), py::arg("split"), py::arg("lips"));

  m.def("lyapunov_perron",
        [](const py::array_t<double>& xi, const ModelParams& p, const SplittingParams& s, std::size_t grid_nodes,
           std::size_t n_t, double tol, bool enforce_gap) {
          LPOptions o;
          o.grid_nodes = grid_nodes;
          o.n_t = n_t;
          o.tol = tol;
          o.enforce_gap = enforce_gap;
          const auto x = from_array(xi);
          GraphPoint g;
          {
            py::gil_scoped_release release;
            g = lyapunov_perron_fixed_point(x, p, s, o);
          }
          py::dict d;
          d["h_u"] = to_array(g.h_u);
          d["h_vF"] = to_array(g.h_vF);
          d["iterations"] = g.iterations;
          d["contraction"] = g.contraction;
          d["T_back"] = g.T_back;
          d["gap_total"] = g.gap.total;
          d["gap_passes"] = g.gap.passes;
          return d;
        },
        py::arg("xi"), py::arg("params"), py::arg("split"), py::arg("grid_nodes") = 64, py::arg("n_t") = 512,
        py::arg("tol") = 1e-10, py::arg("enforce_gap") = true);

  m.def("convergence_study",
        [](const ModelParams& base, const std::vector<double>& eps_list, const std::function<double(double)>& v_in,
           std::size_t N, double T, std::optional<double> delta, double delta_exponent, bool perturbed,
           double eps_in) {
          ConvergenceConfig cfg;
          cfg.base = base;
          cfg.eps_list = eps_list;
          cfg.N = N;
          cfg.T = T;
          cfg.delta_fixed = delta;
          cfg.delta_exponent = delta_exponent;
          cfg.preparation = perturbed ? Preparation::perturbed : Preparation::well_prepared;
          cfg.eps_in_target = eps_in;
          cfg.timing = false;
          // Sample the Python callable once on a fine table so worker threads never touch the GIL.
          const Grid g(base.L, N);
          const SpectralField v = SpectralField::from_function(g, v_in);
          cfg.v_in = [v](double x) { return v.evaluate(x); };
          const ConvergenceReport rep = convergence_study(cfg);
          py::list rows;
          for (const auto& r : rep.rows) {
            py::dict d;
            d["eps"] = r.eps;
            d["delta"] = r.delta;
            d["eps_in"] = r.eps_in;
            d["E_LinfL2"] = r.errors.LinfL2;
            d["E_L2H1"] = r.errors.L2H1;
            d["E_LinfH2"] = r.errors.LinfH2;
            d["E_LinfL2_postlayer"] = r.errors.LinfL2_post;
            d["ok"] = r.ok;
            rows.append(d);
          }
          py::dict out;
          out["rows"] = rows;
          out["order_LinfL2"] = rep.order_LinfL2.order;
          out["order_L2H1"] = rep.order_L2H1.order;
          out["order_LinfH2"] = rep.order_LinfH2.order;
          out["fit_residual"] = rep.fit_residual;
          out["plateau"] = rep.plateau;
          return out;
        },
        py::arg("base"), py::arg("eps_list"), py::arg("v_in"), py::arg("N") = 128, py::arg("T") = 0.5,
        py::arg("delta") = py::none(), py::arg("delta_exponent") = 1.5, py::arg("perturbed") = false,
        py::arg("eps_in") = 0.1);

  m.def("run_config",
        [](const std::string& yaml, const std::string& out_dir, std::optional<std::uint64_t> seed) {
          const ExperimentConfig cfg = parse_config_text(yaml, seed);
          std::ostringstream log, err;
          const int code = run_guarded(cfg, RunOptions{out_dir, std::nullopt, true}, log, err);
          return py::make_tuple(code, err.str());
        },
        py::arg("yaml"), py::arg("out_dir") = ".", py::arg("seed") = py::none(),
        "Runs one experiment from YAML text; returns (exit_code, error_message).");
}
