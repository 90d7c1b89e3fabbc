#include "sumdca/checkpoint.hpp"

#include <fstream>

#include "sumdca/binary_io.hpp"
#include "sumdca/config.hpp"
#include "sumdca/errors.hpp"

namespace sumdca {
namespace {

constexpr std::string_view kMagic = "SDCACKPT";

void write_matrix_values(BinaryWriter& w, const Matrix& m) {
  for (double v : m.data()) w.f64(v);
}

Matrix read_matrix_values(BinaryReader& r, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = r.f64();
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainConfig& config, const TrainState& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write checkpoint '" + path + "'");
  TrainConfig resolved = config;
  resolved.model = state.params.config;

  BinaryWriter w(out);
  w.raw(kMagic);
  w.u32(kCheckpointVersion);
  w.string(format_config(resolved));
  w.u64(state.epoch);
  w.u64(state.adam.step);
  w.u32(state.params.heads.recon_output_sigmoid ? 1u : 0u);

  const auto params = state.params.parameters();
  const bool has_moments = state.adam.first_moment.size() == params.size();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Parameter& p = *params[k];
    w.string(p.name);
    w.u64(p.value.rows());
    w.u64(p.value.cols());
    write_matrix_values(w, p.value);
    const Matrix zero(p.value.rows(), p.value.cols());
    write_matrix_values(w, has_moments ? state.adam.first_moment[k] : zero);
    write_matrix_values(w, has_moments ? state.adam.second_moment[k] : zero);
  }
  if (!out) throw DataError(DataErrorKind::kIo, "failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open checkpoint '" + path + "'");
  BinaryReader r(in, path);
  if (r.raw(kMagic.size()) != kMagic)
    throw DataError(DataErrorKind::kBadMagic, path + ": not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw DataError(DataErrorKind::kVersionMismatch,
                    path + ": checkpoint version " + std::to_string(version) + ", expected " +
                        std::to_string(kCheckpointVersion));
  r.section("config");
  Checkpoint ck;
  apply_config(ck.config, parse_key_values(r.string()));

  r.section("state");
  const std::uint64_t epoch = r.u64();
  const std::uint64_t step = r.u64();
  const std::uint32_t flags = r.u32();

  // Rebuild the parameter layout from the config, then overwrite values.
  ck.state.params = init_params(ck.config.model, 0);
  ck.state.params.heads.recon_output_sigmoid = (flags & 1u) != 0;
  ck.state.epoch = epoch;
  ck.state.adam.step = step;

  auto params = ck.state.params.parameters();
  r.section("parameters");
  const std::uint32_t count = r.u32();
  if (count != params.size())
    throw DataError(DataErrorKind::kShapeInconsistency,
                    path + ": checkpoint holds " + std::to_string(count) + " parameters, model has " +
                        std::to_string(params.size()));
  for (Parameter* p : params) {
    r.section("parameter " + p->name);
    const std::string name = r.string();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols())
      throw DataError(DataErrorKind::kShapeInconsistency,
                      path + ": parameter '" + name + "' " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " does not match expected '" + p->name + "' " +
                          shape_string(p->value));
    p->value = read_matrix_values(r, rows, cols);
    p->zero_grad();
    ck.state.adam.first_moment.push_back(read_matrix_values(r, rows, cols));
    ck.state.adam.second_moment.push_back(read_matrix_values(r, rows, cols));
  }
  return ck;
}

}  // namespace sumdca
