#include "krein/matrix_io.hpp"

#include <fstream>

namespace krein {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
  if (m.rows() != m.cols()) throw FormatError("matrix_to_json: only square matrices are exchanged");
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Mat matrix_from_json(const json& j) {
  try {
    const auto n = j.at("dim").get<Eigen::Index>();
    if (n <= 0) throw FormatError("matrix: dim must be positive");
    const json& re = j.at("re");
    const json* im = j.contains("im") ? &j.at("im") : nullptr;
    if (!re.is_array() || static_cast<Eigen::Index>(re.size()) != n ||
        (im && (!im->is_array() || static_cast<Eigen::Index>(im->size()) != n))) {
      throw FormatError("matrix: row count does not match dim");
    }
    Mat m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const json& row_re = re.at(r);
      if (static_cast<Eigen::Index>(row_re.size()) != n) throw FormatError("matrix: ragged row");
      for (Eigen::Index c = 0; c < n; ++c) {
        double vi = 0.0;
        if (im) {
          const json& row_im = im->at(r);
          if (static_cast<Eigen::Index>(row_im.size()) != n) throw FormatError("matrix: ragged row");
          vi = row_im.at(c).get<double>();
        }
        m(r, c) = cplx(row_re.at(c).get<double>(), vi);
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("matrix: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_matrix(const std::filesystem::path& path, const Mat& m) {
  write_json(path, matrix_to_json(m));
}

Mat read_matrix(const std::filesystem::path& path) { return matrix_from_json(read_json(path)); }

json singular_model_to_json(const SingularModel& sm) {
  return {{"H", matrix_to_json(sm.model().matrix())},
          {"A", matrix_to_json(sm.a())},
          {"S", matrix_to_json(sm.s())},
          {"s_exponent", sm.pert().s_exponent},
          {"lambda_circ", sm.lambda_circ()}};
}

SingularModel singular_model_from_json(const json& j) {
  try {
    OperatorModel model(matrix_from_json(j.at("H")));
    Perturbation pert =
        Perturbation::make(matrix_from_json(j.at("A")), j.at("s_exponent").get<double>(), model);
    CorrectionS corr = CorrectionS::make(matrix_from_json(j.at("S")), model);
    const double lc = j.at("lambda_circ").get<double>();
    return SingularModel(std::move(model), std::move(pert), std::move(corr), lc);
  } catch (const json::exception& e) {
    throw FormatError(std::string("singular model: ") + e.what());
  }
}

}  // namespace krein
