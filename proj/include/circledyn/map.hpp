#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "circledyn/circle.hpp"

namespace circledyn {

class CircleMap;
using MapPtr = std::shared_ptr<const CircleMap>;

struct NotInvertibleError : Error {
  explicit NotInvertibleError(const std::string& m) : Error(m) {}
};

// Common evaluation/derivative interface for every group-element
// representation (Moebius, piecewise-linear, smoothed, rotations).
// Implementations are immutable; all methods are const and thread-safe.
class CircleMap {
 public:
  virtual ~CircleMap() = default;

  virtual Chart chart() const = 0;
  virtual CirclePoint apply(const CirclePoint& x) const = 0;
  virtual double derivative(const CirclePoint& x) const = 0;
  virtual std::string describe() const = 0;

  virtual MapPtr inverse() const {
    throw NotInvertibleError(describe() + ": no inverse available");
  }
  // Canonical key identifying the map exactly, when the representation is
  // exact (integer matrices, dyadic tables).  Empty when unavailable.
  virtual std::string exact_key() const { return {}; }
  // Exact composition `this after other`, when both representations support
  // it.  Nullptr when unavailable.
  virtual MapPtr compose_exact(const MapPtr& /*other*/) const { return nullptr; }
};

class IdentityMap final : public CircleMap {
 public:
  explicit IdentityMap(Chart c) : chart_(c) {}
  Chart chart() const override { return chart_; }
  CirclePoint apply(const CirclePoint& x) const override {
    require_chart(x, chart_, "IdentityMap");
    return x;
  }
  double derivative(const CirclePoint& x) const override {
    require_chart(x, chart_, "IdentityMap");
    return 1.0;
  }
  MapPtr inverse() const override { return std::make_shared<IdentityMap>(chart_); }
  std::string describe() const override { return "id"; }
  std::string exact_key() const override { return "id"; }

 private:
  Chart chart_;
};

class RotationMap final : public CircleMap {
 public:
  RotationMap(double amount, Chart c) : amount_(reduce_coordinate(amount, c)), chart_(c) {}
  Chart chart() const override { return chart_; }
  CirclePoint apply(const CirclePoint& x) const override {
    require_chart(x, chart_, "RotationMap");
    return CirclePoint{reduce_coordinate(x.coord + amount_, chart_), chart_};
  }
  double derivative(const CirclePoint& x) const override {
    require_chart(x, chart_, "RotationMap");
    return 1.0;
  }
  MapPtr inverse() const override { return std::make_shared<RotationMap>(-amount_, chart_); }
  std::string describe() const override { return "rot(" + std::to_string(amount_) + ")"; }
  double amount() const { return amount_; }

 private:
  double amount_;
  Chart chart_;
};

// One generator symbol: index into a family plus an inversion flag.
struct Symbol {
  int generator = 0;
  bool inverse = false;
  bool operator==(const Symbol& o) const = default;
  Symbol inverted() const { return {generator, !inverse}; }
};

// Finite sequence of generator symbols with free-group reduction.
struct Word {
  std::vector<Symbol> symbols;

  Word() = default;
  explicit Word(std::vector<Symbol> s) : symbols(std::move(s)) {}

  size_t length() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }

  Word reduced() const {
    Word out;
    for (const Symbol& s : symbols) {
      if (!out.symbols.empty() && out.symbols.back() == s.inverted())
        out.symbols.pop_back();
      else
        out.symbols.push_back(s);
    }
    return out;
  }

  Word inverted() const {
    Word out;
    out.symbols.reserve(symbols.size());
    for (auto it = symbols.rbegin(); it != symbols.rend(); ++it)
      out.symbols.push_back(it->inverted());
    return out;
  }

  Word then(const Symbol& s) const {
    Word out = *this;
    out.symbols.push_back(s);
    return out;
  }

  bool operator==(const Word& o) const = default;
};

// Finitely many generators with a sampled bound c_family on |(log f')'| over
// the generators and their inverses.
class MapFamily {
 public:
  MapFamily(std::vector<MapPtr> generators, int c_grid, double c_safety);
  explicit MapFamily(std::vector<MapPtr> generators);

  const std::vector<MapPtr>& generators() const { return generators_; }
  size_t size() const { return generators_.size(); }
  Chart chart() const { return chart_; }
  double c_family() const { return c_family_; }

  // The map (or its inverse) selected by a symbol.
  const MapPtr& map_for(const Symbol& s) const;

  // All semigroup letters: each generator and its inverse.
  std::vector<Symbol> letters() const;

  // Marks the family as free on its generator symbols, enabling the exact
  // reduced word-length oracle in the random-walk estimators.
  MapFamily& mark_free() { free_ = true; return *this; }
  bool is_free() const { return free_; }

 private:
  std::vector<MapPtr> generators_;
  std::vector<MapPtr> inverses_;
  Chart chart_;
  double c_family_ = 0.0;
  bool free_ = false;
};

struct ComposeResult {
  std::vector<CirclePoint> trajectory;  // length n+1, starts at x
  double log_derivative = 0.0;          // chain-rule sum of log derivatives
};

struct FirstReturn {
  double value = 0.0;
  long tau = 0;
};

// Evaluates the composition described by `word` (leftmost symbol applied
// first) along with the chain-rule log-derivative.
ComposeResult compose_evaluate(const Word& word, const MapFamily& family, const CirclePoint& x);

// A word over a family, packaged as a single CircleMap.
class WordMap final : public CircleMap {
 public:
  WordMap(Word word, const MapFamily* family) : word_(std::move(word)), family_(family) {}
  Chart chart() const override { return family_->chart(); }
  CirclePoint apply(const CirclePoint& x) const override {
    return compose_evaluate(word_, *family_, x).trajectory.back();
  }
  double derivative(const CirclePoint& x) const override {
    return std::exp(compose_evaluate(word_, *family_, x).log_derivative);
  }
  MapPtr inverse() const override {
    return std::make_shared<WordMap>(word_.inverted(), family_);
  }
  std::string describe() const override { return "word[" + std::to_string(word_.length()) + "]"; }

 private:
  Word word_;
  const MapFamily* family_;  // not owned; families outlive the word maps they back
};

// Sampled estimate of sup |(log f')'| over the circle, via divided
// differences of log f' on a uniform grid.
double log_derivative_variation(const CircleMap& f, int grid);

}  // namespace circledyn
