#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace beliefsim {

// Slack allowed on the unit-ball bound before a position is rejected.
inline constexpr double kUnitBallSlack = 1e-9;

// A point in the K-dimensional belief space. The origin is neutrality and the
// norm is the extremity of the belief, so valid positions lie in the closed
// unit ball. The type itself only stores coordinates; validate_belief() checks
// the invariants at the boundaries where positions enter the model.
class BeliefVector {
public:
    BeliefVector() = default;
    explicit BeliefVector(std::size_t dims) : components_(dims, 0.0) {}
    explicit BeliefVector(std::vector<double> components)
        : components_(std::move(components)) {}
    BeliefVector(std::initializer_list<double> components) : components_(components) {}
    explicit BeliefVector(std::span<const double> components)
        : components_(components.begin(), components.end()) {}

    std::size_t dims() const noexcept { return components_.size(); }
    double operator[](std::size_t i) const { return components_[i]; }
    double& operator[](std::size_t i) { return components_[i]; }

    std::span<const double> view() const noexcept { return components_; }
    operator std::span<const double>() const noexcept { return components_; }
    const std::vector<double>& components() const noexcept { return components_; }

    friend bool operator==(const BeliefVector&, const BeliefVector&) = default;

private:
    std::vector<double> components_;
};

enum class ConsumerKind : std::uint8_t { Biased, Uniform };

struct Agent {
    std::uint32_t id = 0;
    BeliefVector position;
    double visibility_radius = 0.0;
    std::uint32_t capacity = 1;
    ConsumerKind consumer_kind = ConsumerKind::Biased;
    bool committed = false;
};

struct Document {
    std::uint32_t id = 0;
    BeliefVector position;
    std::uint32_t source_id = 0;
    bool is_misinformation = false;
};

double norm(std::span<const double> v) noexcept;

// Throws std::invalid_argument when the dimensionalities differ.
double distance(std::span<const double> a, std::span<const double> b);

// Radial projection onto the closed unit ball. Throws on non-finite input.
BeliefVector clamp_to_unit_ball(const BeliefVector& v);

bool is_valid_belief(std::span<const double> v) noexcept;

// Throws std::invalid_argument naming `what` if v is non-finite or outside
// the unit ball (beyond kUnitBallSlack).
void validate_belief(std::span<const double> v, const char* what = "belief vector");

}  // namespace beliefsim
