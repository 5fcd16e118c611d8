#pragma once

#include <cstdint>
#include <string>

#include "csas/simulator.hpp"

namespace csas {

enum class SceneKind { Empty, Sparse, Ripples, Quadrants, Diffuse, PhaseGrid };

/// Amplitude pattern underneath the quadrant, diffuse and phase-grid phases.
enum class SceneBase { Ripples, Lattice, Blocks };

SceneKind parse_scene_kind(const std::string& name);
std::string to_string(SceneKind kind);
SceneBase parse_scene_base(const std::string& name);
std::string to_string(SceneBase base);

struct SceneSpec {
  SceneKind kind = SceneKind::Sparse;
  int n = 64;
  double extent = 0.126;
  double z0 = 0.0;
  std::uint64_t seed = 0;
  /// Sparse scenes: number of scatterers; 0 picks n*n/64.
  int count = 0;
  /// Phase-grid scenes: cells per side.
  int cells = 4;
  /// Quadrant, diffuse and phase-grid scenes: amplitude pattern, and for the
  /// lattice base its spacing in pixels (1 fills the support).
  SceneBase base = SceneBase::Ripples;
  int spacing = 3;
  /// Scatterers are confined to this fraction of n around the centre.
  double support = 0.35;
};

/// Procedural ground-truth scenes.
///   sparse     isolated point scatterers, amplitudes in [0.5, 1]
///   ripples    sand-ripple texture
///   quadrants  base amplitude with the quadrant phase layout
///   diffuse    base amplitude with i.i.d. uniform phase
///   phase-grid base amplitude, one phase per cell, linearly spaced in [0, 2pi)
ScatterScene generate_scene(const SceneSpec& spec);

/// Support radius in pixels for a scene of side n.
double support_radius(int n, double support);

}  // namespace csas
