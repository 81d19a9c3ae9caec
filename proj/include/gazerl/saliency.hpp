#pragma once

#include <iosfwd>
#include <vector>

#include "gazerl/episode.hpp"

namespace gazerl {

/// Dense W×H attention grid, row-major.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  SaliencyMap() = default;
  SaliencyMap(int w, int h)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

struct SaliencyConfig {
  double sigma_px = 10.0;      // one visual degree by default
  double threshold = 0.4;
  double px_per_degree = 10.0;
};

struct MaskCell {
  int x = 0;
  int y = 0;
  double value = 0.0;
};

/// Raw per-cell gaze counts for one episode.
SaliencyMap fixation_map(const EpisodeLog& log);

/// Separable Gaussian convolution, kernel radius ceil(3*sigma), zero-padded
/// borders, kernel normalized to unit mass.
SaliencyMap gaussian_blur(const SaliencyMap& map, double sigma_px);

/// Divides by the map maximum; an all-zero map is returned unchanged.
SaliencyMap normalize(const SaliencyMap& map);

/// Cells with value strictly above t, in row-major scan order.
std::vector<MaskCell> threshold_mask(const SaliencyMap& map, double t);

/// Grayscale PGM (P2) heatmap, values rounded to value*255.
void write_pgm(const SaliencyMap& map, std::ostream& out);

}  // namespace gazerl
