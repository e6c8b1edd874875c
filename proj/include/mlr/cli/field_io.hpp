#pragma once
// Dense binary dump of a sampled density: interleaved little-endian float64
// (re, im) pairs in row-major order over the integer bounding box of the
// lattice, plus a JSON sidecar carrying shape, spacing, the parameter-space
// coordinates of the box corner and the patch id.

#include <filesystem>
#include <fstream>
#include <vector>

#include "mlr/cli/jsonx.hpp"
#include "mlr/extension/density.hpp"

namespace mlr {

// Writes base.bin and base.json; returns the sidecar.
inline json write_field(const std::filesystem::path& base, const SampledDensity& f,
                        int patch_id) {
  const int d = f.dim();
  require(f.size() > 0, "write_field: empty density");
  Eigen::VectorXi lo = f.idx[0], hi = f.idx[0];
  for (const auto& ix : f.idx) {
    lo = lo.cwiseMin(ix);
    hi = hi.cwiseMax(ix);
  }
  std::vector<std::size_t> shape(static_cast<std::size_t>(d));
  std::size_t count = 1;
  for (int k = 0; k < d; ++k) {
    shape[static_cast<std::size_t>(k)] = static_cast<std::size_t>(hi[k] - lo[k] + 1);
    count *= shape[static_cast<std::size_t>(k)];
  }

  std::vector<double> buf(2 * count, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::size_t off = 0;
    for (int k = 0; k < d; ++k)
      off = off * shape[static_cast<std::size_t>(k)] +
            static_cast<std::size_t>(f.idx[i][k] - lo[k]);
    buf[2 * off] = f.amp[i].real();
    buf[2 * off + 1] = f.amp[i].imag();
  }

  auto bin = base;
  bin += ".bin";
  std::ofstream out(bin, std::ios::binary);
  require(out.good(), "write_field: cannot open " + bin.string());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
  require(out.good(), "write_field: short write to " + bin.string());

  json side;
  side["shape"] = shape;
  side["spacing"] = f.h;
  Vec corner(d);
  for (int k = 0; k < d; ++k) corner[k] = f.h * lo[k];
  side["center"] = vec_to_json(corner);
  side["patch_id"] = patch_id;

  auto sj = base;
  sj += ".json";
  std::ofstream sout(sj);
  sout << side.dump(2) << "\n";
  require(sout.good(), "write_field: short write to " + sj.string());
  return side;
}

}  // namespace mlr
