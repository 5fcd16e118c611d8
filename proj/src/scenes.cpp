#include "csas/scenes.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace csas {

namespace {

bool inside(int n, double radius, int r, int c) {
  const double h = 0.5 * (n - 1);
  return std::hypot(r - h, c - h) <= radius;
}

// Regular lattice of unit scatterers every `spacing` pixels inside the support.
RealImage lattice(int n, double radius, int spacing) {
  RealImage s = RealImage::Zero(n, n);
  const int offset = (n / 2) % spacing;
  for (int r = offset; r < n; r += spacing)
    for (int c = offset; c < n; c += spacing)
      if (inside(n, radius, r, c)) s(r, c) = 1.0;
  return s;
}

// Sand-ripple texture: a slightly curved sinusoid in [0, 1].
RealImage ripples(int n, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double angle = std::numbers::pi * (0.15 + 0.2 * uni(rng));
  const double period = 5.0 + 3.0 * uni(rng);  // pixels
  const double bend = 0.02 * uni(rng);
  RealImage s = RealImage::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (!inside(n, radius, r, c)) continue;
      const double u = c * std::cos(angle) + r * std::sin(angle);
      const double v = -c * std::sin(angle) + r * std::cos(angle);
      s(r, c) = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (u + bend * v * v) / period);
    }
  s /= std::max(s.maxCoeff(), 1e-12);
  return s;
}

// Random axis-aligned patches of constant reflectivity.
RealImage blocks(int n, double radius, std::mt19937_64& rng) {
  RealImage s = RealImage::Zero(n, n);
  std::uniform_int_distribution<int> pos(0, n - 1), size(2, std::max(2, n / 6));
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  const int count = std::max(1, n * n / 80);
  for (int i = 0; i < count; ++i) {
    const int r0 = pos(rng), c0 = pos(rng), h = size(rng), w = size(rng);
    const double a = amp(rng);
    for (int r = r0; r < std::min(n, r0 + h); ++r)
      for (int c = c0; c < std::min(n, c0 + w); ++c)
        if (inside(n, radius, r, c)) s(r, c) = a;
  }
  return s;
}

}  // namespace

SceneKind parse_scene_kind(const std::string& name) {
  if (name == "empty") return SceneKind::Empty;
  if (name == "sparse") return SceneKind::Sparse;
  if (name == "ripples") return SceneKind::Ripples;
  if (name == "quadrants") return SceneKind::Quadrants;
  if (name == "diffuse") return SceneKind::Diffuse;
  if (name == "phase-grid") return SceneKind::PhaseGrid;
  throw InvalidArgument("unknown scene kind '" + name +
                        "' (expected empty, sparse, ripples, quadrants, diffuse or phase-grid)");
}

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::Empty: return "empty";
    case SceneKind::Sparse: return "sparse";
    case SceneKind::Ripples: return "ripples";
    case SceneKind::Quadrants: return "quadrants";
    case SceneKind::Diffuse: return "diffuse";
    case SceneKind::PhaseGrid: return "phase-grid";
  }
  return "unknown";
}

SceneBase parse_scene_base(const std::string& name) {
  if (name == "ripples") return SceneBase::Ripples;
  if (name == "lattice") return SceneBase::Lattice;
  if (name == "blocks") return SceneBase::Blocks;
  throw InvalidArgument("unknown scene base '" + name + "' (expected ripples, lattice or blocks)");
}

std::string to_string(SceneBase base) {
  switch (base) {
    case SceneBase::Ripples: return "ripples";
    case SceneBase::Lattice: return "lattice";
    case SceneBase::Blocks: return "blocks";
  }
  return "unknown";
}

double support_radius(int n, double support) { return support * n; }

ScatterScene generate_scene(const SceneSpec& spec) {
  require(spec.n >= 2, "generate_scene: n must be at least 2");
  require(spec.support > 0.0, "generate_scene: support must be positive");
  require(spec.spacing >= 1, "generate_scene: lattice spacing must be positive");
  const int n = spec.n;
  const SceneGrid grid = build_grid(n, spec.extent, spec.z0);
  const double radius = support_radius(n, spec.support);
  std::mt19937_64 rng(mix_seed(spec.seed, 0x5ce7e));
  auto base = [&] {
    switch (spec.base) {
      case SceneBase::Ripples: return ripples(n, radius, rng);
      case SceneBase::Blocks: return blocks(n, radius, rng);
      case SceneBase::Lattice: break;
    }
    return lattice(n, radius, spec.spacing);
  };

  switch (spec.kind) {
    case SceneKind::Empty:
      return make_scene(grid, RealImage::Zero(n, n));

    case SceneKind::Sparse: {
      const int want = spec.count > 0 ? spec.count : std::max(1, n * n / 64);
      std::vector<std::pair<int, int>> candidates;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (inside(n, radius, r, c)) candidates.emplace_back(r, c);
      require(!candidates.empty(), "generate_scene: support contains no pixels");
      RealImage s = RealImage::Zero(n, n);
      std::uniform_real_distribution<double> amp(0.5, 1.0);
      const int take = std::min<int>(want, static_cast<int>(candidates.size()));
      for (int i = 0; i < take; ++i) {
        // Partial Fisher-Yates: draw without replacement.
        std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
        std::swap(candidates[i], candidates[pick(rng)]);
        s(candidates[i].first, candidates[i].second) = amp(rng);
      }
      return make_scene(grid, std::move(s));
    }

    case SceneKind::Ripples:
      return make_scene(grid, ripples(n, radius, rng));

    case SceneKind::Quadrants:
      return apply_phase_quadrants(make_scene(grid, base()));

    case SceneKind::Diffuse:
      return apply_random_phase(make_scene(grid, base()), spec.seed);

    case SceneKind::PhaseGrid: {
      require(spec.cells >= 1 && spec.cells <= n, "generate_scene: cells must lie in [1, n]");
      RealImage phase(n, n);
      const int cells = spec.cells;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const int cr = r * cells / n, cc = c * cells / n;
          phase(r, c) = 2.0 * std::numbers::pi * (cr * cells + cc) / (cells * cells);
        }
      return make_scene(grid, base(), std::move(phase));
    }
  }
  throw InvalidArgument("generate_scene: unhandled scene kind");
}

}  // namespace csas
