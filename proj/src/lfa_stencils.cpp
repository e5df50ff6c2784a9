// Closed-form interior stencils of the discretization and of the grid transfer.
#include <cmath>

#include "biot/lfa.hpp"

namespace biot::stencils {

namespace {

using K = DofKind;

const double r2 = std::sqrt(2.0);

// Adds the transposed taps of every off-diagonal kind block.
std::vector<StencilEntry> with_transposes(std::vector<StencilEntry> e) {
  const size_t n = e.size();
  for (size_t i = 0; i < n; ++i)
    if (e[i].row != e[i].col) e.push_back({e[i].col, e[i].row, -e[i].dx, -e[i].dy, e[i].value});
  return e;
}

// Taps shared by the strain and grad-div stencils.
void add_vertex_bubble_couplings(std::vector<StencilEntry>& e) {
  const double d = 2.0 * r2 / 3.0;
  for (K k : {K::P1x, K::P1y}) {
    e.push_back({k, K::BubbleDiag, -0.5, -0.5, -d});
    e.push_back({k, K::BubbleDiag, 0.5, 0.5, -d});
    e.push_back({k, K::BubbleDiag, -0.5, 0.5, d});
    e.push_back({k, K::BubbleDiag, 0.5, -0.5, d});
  }
  const double t = 2.0 / 3.0;
  e.push_back({K::P1x, K::BubbleX, -1.0, 0.5, -t});
  e.push_back({K::P1x, K::BubbleX, 1.0, -0.5, -t});
  e.push_back({K::P1x, K::BubbleX, 0.0, 0.5, t});
  e.push_back({K::P1x, K::BubbleX, 0.0, -0.5, t});
  e.push_back({K::P1y, K::BubbleY, 0.5, 0.0, t});
  e.push_back({K::P1y, K::BubbleY, -0.5, 0.0, t});
  e.push_back({K::P1y, K::BubbleY, -0.5, 1.0, -t});
  e.push_back({K::P1y, K::BubbleY, 0.5, -1.0, -t});
}

}  // namespace

const std::vector<StencilEntry>& strain() {
  static const std::vector<StencilEntry> table = [] {
    std::vector<StencilEntry> e = {
        {K::P1x, K::P1x, 0, 0, 3.0},       {K::P1x, K::P1x, 1, 0, -1.0},
        {K::P1x, K::P1x, -1, 0, -1.0},     {K::P1x, K::P1x, 0, 1, -0.5},
        {K::P1x, K::P1x, 0, -1, -0.5},     {K::P1y, K::P1y, 0, 0, 3.0},
        {K::P1y, K::P1y, 0, 1, -1.0},      {K::P1y, K::P1y, 0, -1, -1.0},
        {K::P1y, K::P1y, 1, 0, -0.5},      {K::P1y, K::P1y, -1, 0, -0.5},
        {K::P1x, K::P1y, 0, 0, 0.5},       {K::P1x, K::P1y, 1, 0, -0.25},
        {K::P1x, K::P1y, -1, 0, -0.25},    {K::P1x, K::P1y, 0, 1, -0.25},
        {K::P1x, K::P1y, 0, -1, -0.25},    {K::P1x, K::P1y, -1, 1, 0.25},
        {K::P1x, K::P1y, 1, -1, 0.25},     {K::BubbleDiag, K::BubbleDiag, 0, 0, 14.0 / 3.0},
        {K::BubbleX, K::BubbleX, 0, 0, 4.0}, {K::BubbleY, K::BubbleY, 0, 0, 4.0},
        {K::BubbleX, K::BubbleY, -0.5, 0.5, 1.0 / 3.0},
        {K::BubbleX, K::BubbleY, 0.5, -0.5, 1.0 / 3.0},
    };
    const double c = -5.0 * r2 / 6.0;
    e.push_back({K::BubbleDiag, K::BubbleX, 0.5, 0, c});
    e.push_back({K::BubbleDiag, K::BubbleX, -0.5, 0, c});
    e.push_back({K::BubbleDiag, K::BubbleY, 0, 0.5, c});
    e.push_back({K::BubbleDiag, K::BubbleY, 0, -0.5, c});
    add_vertex_bubble_couplings(e);
    return with_transposes(e);
  }();
  return table;
}

const std::vector<StencilEntry>& grad_div() {
  static const std::vector<StencilEntry> table = [] {
    std::vector<StencilEntry> e = {
        {K::P1x, K::P1x, 0, 0, 2.0},       {K::P1x, K::P1x, 1, 0, -1.0},
        {K::P1x, K::P1x, -1, 0, -1.0},     {K::P1y, K::P1y, 0, 0, 2.0},
        {K::P1y, K::P1y, 0, 1, -1.0},      {K::P1y, K::P1y, 0, -1, -1.0},
        {K::P1x, K::P1y, 0, 0, 1.0},       {K::P1x, K::P1y, 1, 0, -0.5},
        {K::P1x, K::P1y, -1, 0, -0.5},     {K::P1x, K::P1y, 0, 1, -0.5},
        {K::P1x, K::P1y, 0, -1, -0.5},     {K::P1x, K::P1y, -1, 1, 0.5},
        {K::P1x, K::P1y, 1, -1, 0.5},      {K::BubbleDiag, K::BubbleDiag, 0, 0, 4.0},
        {K::BubbleX, K::BubbleX, 0, 0, 8.0 / 3.0}, {K::BubbleY, K::BubbleY, 0, 0, 8.0 / 3.0},
        {K::BubbleX, K::BubbleY, -0.5, 0.5, 2.0 / 3.0},
        {K::BubbleX, K::BubbleY, 0.5, -0.5, 2.0 / 3.0},
        {K::BubbleDiag, K::BubbleX, 0.5, 0, -r2}, {K::BubbleDiag, K::BubbleX, -0.5, 0, -r2},
        {K::BubbleDiag, K::BubbleY, 0, 0.5, -r2}, {K::BubbleDiag, K::BubbleY, 0, -0.5, -r2},
    };
    add_vertex_bubble_couplings(e);
    return with_transposes(e);
  }();
  return table;
}

const std::vector<StencilEntry>& div_u() {
  static const std::vector<StencilEntry> table = [] {
    const double d = 2.0 * r2 / 3.0, t = 2.0 / 3.0;
    return std::vector<StencilEntry>{
        {K::P0Lower, K::P1x, -0.5, -0.5, 0.5},  {K::P0Lower, K::P1x, 0.5, -0.5, -0.5},
        {K::P0Lower, K::P1y, -0.5, -0.5, 0.5},  {K::P0Lower, K::P1y, -0.5, 0.5, -0.5},
        {K::P0Lower, K::BubbleDiag, 0, 0, -d},  {K::P0Lower, K::BubbleX, -0.5, 0, t},
        {K::P0Lower, K::BubbleY, 0, -0.5, t},   {K::P0Upper, K::P1x, -0.5, 0.5, 0.5},
        {K::P0Upper, K::P1x, 0.5, 0.5, -0.5},   {K::P0Upper, K::P1y, 0.5, -0.5, 0.5},
        {K::P0Upper, K::P1y, 0.5, 0.5, -0.5},   {K::P0Upper, K::BubbleDiag, 0, 0, d},
        {K::P0Upper, K::BubbleX, 0.5, 0, -t},   {K::P0Upper, K::BubbleY, 0, 0.5, -t},
    };
  }();
  return table;
}

const std::vector<StencilEntry>& div_w() {
  static const std::vector<StencilEntry> table = {
      {K::P0Lower, K::FluxDiag, 0, 0, -r2}, {K::P0Lower, K::FluxX, -0.5, 0, 1.0},
      {K::P0Lower, K::FluxY, 0, -0.5, 1.0}, {K::P0Upper, K::FluxDiag, 0, 0, r2},
      {K::P0Upper, K::FluxX, 0.5, 0, -1.0}, {K::P0Upper, K::FluxY, 0, 0.5, -1.0},
  };
  return table;
}

const std::vector<StencilEntry>& darcy_mass() {
  static const std::vector<StencilEntry> table = with_transposes({
      {K::FluxDiag, K::FluxDiag, 0, 0, 2.0 / 3.0},
      {K::FluxX, K::FluxX, 0, 0, 2.0 / 3.0},
      {K::FluxY, K::FluxY, 0, 0, 2.0 / 3.0},
      {K::FluxX, K::FluxY, -0.5, 0.5, -1.0 / 6.0},
      {K::FluxX, K::FluxY, 0.5, -0.5, -1.0 / 6.0},
  });
  return table;
}

const std::vector<StencilEntry>& restriction() {
  static const std::vector<StencilEntry> table = [] {
    const double a = 3.0 * r2 / 16.0, b = 3.0 / 8.0, c = 5.0 * r2 / 8.0, q = r2 / 8.0,
                 f = r2 / 2.0, g = r2 / 4.0;
    std::vector<StencilEntry> e;
    // Vertex values.
    for (K k : {K::P1x, K::P1y}) {
      e.push_back({k, k, 0, 0, 1.0});
      for (auto [dx, dy] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}, {-1.0, 1.0},
                            {1.0, -1.0}})
        e.push_back({k, k, dx, dy, 0.5});
    }
    // Coarse P1 onto fine bubbles.
    e.insert(e.end(), {
        {K::P1x, K::BubbleDiag, -1.5, 0.5, -a}, {K::P1x, K::BubbleDiag, 1.5, -0.5, -a},
        {K::P1x, K::BubbleDiag, -0.5, -0.5, a}, {K::P1x, K::BubbleDiag, 0.5, 0.5, a},
        {K::P1x, K::BubbleX, -1, -0.5, -b},     {K::P1x, K::BubbleX, -1, 0.5, b},
        {K::P1x, K::BubbleX, 1, -0.5, b},       {K::P1x, K::BubbleX, 1, 0.5, -b},
        {K::P1x, K::BubbleY, -1.5, 1, b},       {K::P1x, K::BubbleY, -0.5, -1, -b},
        {K::P1x, K::BubbleY, 0.5, 1, -b},       {K::P1x, K::BubbleY, 1.5, -1, b},
        {K::P1y, K::BubbleDiag, -0.5, -0.5, a}, {K::P1y, K::BubbleDiag, 0.5, 0.5, a},
        {K::P1y, K::BubbleDiag, -0.5, 1.5, -a}, {K::P1y, K::BubbleDiag, 0.5, -1.5, -a},
        {K::P1y, K::BubbleX, -1, -0.5, -b},     {K::P1y, K::BubbleX, -1, 1.5, b},
        {K::P1y, K::BubbleX, 1, -1.5, b},       {K::P1y, K::BubbleX, 1, 0.5, -b},
        {K::P1y, K::BubbleY, -0.5, -1, -b},     {K::P1y, K::BubbleY, -0.5, 1, b},
        {K::P1y, K::BubbleY, 0.5, -1, b},       {K::P1y, K::BubbleY, 0.5, 1, -b},
    });
    // Coarse bubbles.
    e.insert(e.end(), {
        {K::BubbleDiag, K::P1x, 0, 0, f},          {K::BubbleDiag, K::P1y, 0, 0, f},
        {K::BubbleDiag, K::BubbleDiag, -0.5, 0.5, 0.25},
        {K::BubbleDiag, K::BubbleDiag, 0.5, -0.5, 0.25},
        {K::BubbleDiag, K::BubbleX, 0, 0.5, c},    {K::BubbleDiag, K::BubbleX, 0, -0.5, c},
        {K::BubbleDiag, K::BubbleY, 0.5, 0, c},    {K::BubbleDiag, K::BubbleY, -0.5, 0, c},
        {K::BubbleX, K::P1x, 0, 0, 1.0},           {K::BubbleX, K::BubbleDiag, -0.5, 0.5, q},
        {K::BubbleX, K::BubbleDiag, 0.5, -0.5, q}, {K::BubbleX, K::BubbleX, 0, 0.5, 0.25},
        {K::BubbleX, K::BubbleX, 0, -0.5, 0.25},   {K::BubbleX, K::BubbleY, 0.5, 0, -1.0},
        {K::BubbleX, K::BubbleY, -0.5, 0, -1.0},   {K::BubbleY, K::P1y, 0, 0, 1.0},
        {K::BubbleY, K::BubbleDiag, -0.5, 0.5, q}, {K::BubbleY, K::BubbleDiag, 0.5, -0.5, q},
        {K::BubbleY, K::BubbleX, 0, 0.5, -1.0},    {K::BubbleY, K::BubbleX, 0, -0.5, -1.0},
        {K::BubbleY, K::BubbleY, 0.5, 0, 0.25},    {K::BubbleY, K::BubbleY, -0.5, 0, 0.25},
    });
    // Darcy fluxes.
    e.insert(e.end(), {
        {K::FluxDiag, K::FluxDiag, -0.5, -0.5, 0.5}, {K::FluxDiag, K::FluxDiag, -0.5, 0.5, 1.0},
        {K::FluxDiag, K::FluxDiag, 0.5, -0.5, 1.0},  {K::FluxDiag, K::FluxDiag, 0.5, 0.5, 0.5},
        {K::FluxDiag, K::FluxX, 0, 0.5, f},          {K::FluxDiag, K::FluxX, 0, -0.5, f},
        {K::FluxDiag, K::FluxY, 0.5, 0, f},          {K::FluxDiag, K::FluxY, -0.5, 0, f},
        {K::FluxX, K::FluxDiag, -0.5, 0.5, g},       {K::FluxX, K::FluxDiag, 0.5, -0.5, g},
        {K::FluxX, K::FluxX, -1, 0.5, 0.5},          {K::FluxX, K::FluxX, 0, 0.5, 1.0},
        {K::FluxX, K::FluxX, 0, -0.5, 1.0},          {K::FluxX, K::FluxX, 1, -0.5, 0.5},
        {K::FluxX, K::FluxY, 0.5, 0, -0.5},          {K::FluxX, K::FluxY, -0.5, 0, -0.5},
        {K::FluxY, K::FluxDiag, -0.5, 0.5, g},       {K::FluxY, K::FluxDiag, 0.5, -0.5, g},
        {K::FluxY, K::FluxX, 0, 0.5, -0.5},          {K::FluxY, K::FluxX, 0, -0.5, -0.5},
        {K::FluxY, K::FluxY, 0.5, 0, 1.0},           {K::FluxY, K::FluxY, -0.5, 0, 1.0},
        {K::FluxY, K::FluxY, -0.5, 1, 0.5},          {K::FluxY, K::FluxY, 0.5, -1, 0.5},
    });
    // Pressures.
    e.insert(e.end(), {
        {K::P0Lower, K::P0Lower, -0.5, -0.5, 1.0}, {K::P0Lower, K::P0Lower, -0.5, 0.5, 1.0},
        {K::P0Lower, K::P0Lower, 0.5, -0.5, 1.0},  {K::P0Lower, K::P0Upper, -0.5, -0.5, 1.0},
        {K::P0Upper, K::P0Lower, 0.5, 0.5, 1.0},   {K::P0Upper, K::P0Upper, -0.5, 0.5, 1.0},
        {K::P0Upper, K::P0Upper, 0.5, -0.5, 1.0},  {K::P0Upper, K::P0Upper, 0.5, 0.5, 1.0},
    });
    return e;
  }();
  return table;
}

}  // namespace biot::stencils
