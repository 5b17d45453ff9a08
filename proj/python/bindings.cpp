#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcodt/baselines.hpp"
#include "fcodt/datasets.hpp"
#include "fcodt/errors.hpp"
#include "fcodt/evaluation.hpp"
#include "fcodt/stumps.hpp"
#include "fcodt/tree.hpp"

namespace py = pybind11;
using namespace fcodt;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ContractViolation("expected a 2-d array");
  const auto r = static_cast<std::size_t>(a.shape(0)), c = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw ContractViolation("expected a 1-d array");
  return Vector(a.data(), a.data() + a.shape(0));
}

Array from_matrix(const DenseMatrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array from_vector(const Vector& v) {
  Array out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Dataset make_dataset(const Array& x, const Array& y) {
  Dataset d;
  d.features = to_matrix(x);
  d.targets = to_vector(y);
  d.validate();
  return d;
}

SplitCriteria criteria(std::size_t max_depth, std::size_t min_split, std::size_t min_leaf, double min_gain) {
  SplitCriteria c{max_depth, min_split, min_leaf, min_gain};
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_fcodt, m) {
  m.doc() = "Oblique regression trees with feature concatenation";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<ObliqueTreeModel>(m, "Model")
      .def_property_readonly("kind", [](const ObliqueTreeModel& t) { return std::string(to_string(t.kind)); })
      .def_readonly("input_dim", &ObliqueTreeModel::input_dim)
      .def_readonly("lambda_", &ObliqueTreeModel::lambda)
      .def_property_readonly("node_count", [](const ObliqueTreeModel& t) { return t.nodes.size(); })
      .def_property_readonly("depth", &ObliqueTreeModel::realized_depth)
      .def("predict", [](const ObliqueTreeModel& t, const Array& x) { return from_vector(predict(t, to_matrix(x))); })
      .def("decision_path",
           [](const ObliqueTreeModel& t, const Array& x) {
             py::list out;
             for (const auto& s : decision_path(t, to_vector(x)))
               out.append(py::make_tuple(s.node, s.score, s.went_left));
             return out;
           })
      .def("to_text", &serialize_model)
      .def_static("from_text", [](const std::string& s) { return deserialize_model(s); })
      .def("__eq__", [](const ObliqueTreeModel& a, const ObliqueTreeModel& b) { return a == b; });

  m.def(
      "fit",
      [](const Array& x, const Array& y, const std::string& method, double lambda, std::size_t max_depth,
         std::size_t min_samples_split, std::size_t min_samples_leaf, double min_gain, bool concatenate,
         bool residual_path) {
        const auto d = make_dataset(x, y);
        const auto c = criteria(max_depth, min_samples_split, min_samples_leaf, min_gain);
        const Method meth = parse_method(method);
        if (meth == Method::fc_odt) return fit_fc_odt(d, lambda, c, VariantFlags{concatenate, residual_path});
        return fit_method(meth, d, lambda, c);
      },
      py::arg("x"), py::arg("y"), py::arg("method") = "fc_odt", py::arg("lam") = 1.0, py::arg("max_depth") = 4,
      py::arg("min_samples_split") = 20, py::arg("min_samples_leaf") = 8, py::arg("min_gain") = 0.0,
      py::arg("concatenate") = true, py::arg("residual_path") = true);

  m.def(
      "grid_search",
      [](const Array& x, const Array& y, const std::string& method, const std::vector<double>& grid,
         std::size_t max_depth, std::size_t folds, std::uint64_t seed) {
        const auto g = grid_search_lambda(make_dataset(x, y), parse_method(method),
                                          criteria(max_depth, 20, 8, 0.0), grid, folds, seed);
        py::dict table;
        for (const auto& cell : g.table) table[py::float_(cell.lambda)] = cell.mean_mse;
        return py::make_tuple(g.best_lambda, table);
      },
      py::arg("x"), py::arg("y"), py::arg("method") = "fc_odt", py::arg("grid") = kDefaultLambdaGrid,
      py::arg("max_depth") = 4, py::arg("folds") = 5, py::arg("seed") = 0);

  m.def(
      "solve_ridge",
      [](const Array& x, const Array& y, double lambda, bool fit_intercept) {
        const auto s = solve_ridge(to_matrix(x), to_vector(y), lambda, {fit_intercept});
        return py::make_tuple(from_vector(s.weights), s.intercept);
      },
      py::arg("x"), py::arg("y"), py::arg("lam"), py::arg("fit_intercept") = true);

  m.def(
      "simulate",
      [](const std::string& which, std::size_t n, double sigma, std::uint64_t seed) {
        const auto d = gen_sim(which, n, sigma, seed);
        return py::make_tuple(from_matrix(d.features), from_vector(d.targets), from_vector(d.noise_free));
      },
      py::arg("which"), py::arg("n"), py::arg("sigma") = 0.01, py::arg("seed") = 0);

  m.def(
      "stump_check",
      [](const ObliqueTreeModel& t, const Array& x, const Array& y) {
        const auto c = verify_orthogonal_expansion(t, make_dataset(x, y));
        py::dict out;
        out["max_abs_deviation"] = c.max_abs_deviation;
        out["target_scale"] = c.target_scale;
        out["prediction_gap"] = c.prediction_gap;
        out["columns"] = c.columns;
        out["dropped"] = c.dropped;
        return out;
      },
      py::arg("model"), py::arg("x"), py::arg("y"));

  m.def("r2", [](const Array& p, const Array& t) { return r2(to_vector(p), to_vector(t)); });
  m.def("mse", [](const Array& p, const Array& t) { return mse(to_vector(p), to_vector(t)); });
  m.def(
      "rank_sum_test",
      [](const Array& a, const Array& b) {
        const auto r = rank_sum_test(to_vector(a), to_vector(b));
        return py::make_tuple(r.statistic, r.p_value, r.exact);
      });
}
