#include "gazerl/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gazerl {

SaliencyMap fixation_map(const EpisodeLog& log) {
  SaliencyMap map(log.frame_width, log.frame_height);
  for (const auto& fr : log.frames) {
    for (const auto& g : fr.gaze) {
      int x = static_cast<int>(std::floor(g.x));
      int y = static_cast<int>(std::floor(g.y));
      if (x >= 0 && x < map.width && y >= 0 && y < map.height)
        map.at(x, y) += 1.0;
    }
  }
  return map;
}

SaliencyMap gaussian_blur(const SaliencyMap& map, double sigma_px) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_px));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma_px * sigma_px));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  // horizontal pass
  SaliencyMap tmp(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      double acc = 0.0;
      int lo = std::max(-radius, -x);
      int hi = std::min(radius, map.width - 1 - x);
      for (int i = lo; i <= hi; ++i)
        acc += kernel[i + radius] * map.at(x + i, y);
      tmp.at(x, y) = acc;
    }
  }
  // vertical pass
  SaliencyMap out(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    int lo = std::max(-radius, -y);
    int hi = std::min(radius, map.height - 1 - y);
    for (int x = 0; x < map.width; ++x) {
      double acc = 0.0;
      for (int i = lo; i <= hi; ++i)
        acc += kernel[i + radius] * tmp.at(x, y + i);
      out.at(x, y) = acc;
    }
  }
  return out;
}

SaliencyMap normalize(const SaliencyMap& map) {
  double mx = 0.0;
  for (double v : map.values) mx = std::max(mx, v);
  if (mx == 0.0) return map;
  SaliencyMap out = map;
  for (auto& v : out.values) v /= mx;
  return out;
}

std::vector<MaskCell> threshold_mask(const SaliencyMap& map, double t) {
  std::vector<MaskCell> mask;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.at(x, y) > t) mask.push_back({x, y, map.at(x, y)});
  return mask;
}

void write_pgm(const SaliencyMap& map, std::ostream& out) {
  out << "P2\n" << map.width << ' ' << map.height << "\n255\n";
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      int v = static_cast<int>(std::lround(map.at(x, y) * 255.0));
      v = std::clamp(v, 0, 255);
      out << v << (x + 1 == map.width ? '\n' : ' ');
    }
  }
}

}  // namespace gazerl
