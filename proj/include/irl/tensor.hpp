#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace irl {

using prec_t = double;

/// Raised whenever an input violates a documented invariant (shape, range,
/// normalization). Carries a human readable location of the first violation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense rows x cols table, row-major. Used for per-step state tables such as
/// V[h][s] and N[h][s].
template <typename T>
class Table2 {
public:
    Table2() = default;
    Table2(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw ValidationError("Table2: negative dimension");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T& operator()(int r, int c) { return data_[index(r, c)]; }
    const T& operator()(int r, int c) const { return data_[index(r, c)]; }

    std::span<T> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const T> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(const Table2& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool operator==(const Table2&) const = default;

private:
    std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols_ + c; }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

/// Dense H x S x A table indexed [step][state][action].
template <typename T>
class Table3 {
public:
    Table3() = default;
    Table3(int horizon, int states, int actions, T fill = T{})
        : horizon_(horizon), states_(states), actions_(actions),
          data_(static_cast<std::size_t>(horizon) * states * actions, fill) {
        if (horizon < 0 || states < 0 || actions < 0) throw ValidationError("Table3: negative dimension");
    }

    int horizon() const { return horizon_; }
    int states() const { return states_; }
    int actions() const { return actions_; }

    T& operator()(int h, int s, int a) { return data_[index(h, s, a)]; }
    const T& operator()(int h, int s, int a) const { return data_[index(h, s, a)]; }

    /// Action slice at (h, s).
    std::span<T> row(int h, int s) { return {data_.data() + index(h, s, 0), static_cast<std::size_t>(actions_)}; }
    std::span<const T> row(int h, int s) const {
        return {data_.data() + index(h, s, 0), static_cast<std::size_t>(actions_)};
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(const Table3& o) const {
        return horizon_ == o.horizon_ && states_ == o.states_ && actions_ == o.actions_;
    }
    template <typename U>
    bool same_shape(const Table3<U>& o) const {
        return horizon_ == o.horizon() && states_ == o.states() && actions_ == o.actions();
    }
    bool operator==(const Table3&) const = default;

private:
    std::size_t index(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * states_ + s) * actions_ + a;
    }

    int horizon_ = 0;
    int states_ = 0;
    int actions_ = 0;
    std::vector<T> data_;
};

/// Transition-shaped H x S x A x S' table.
class Kernel {
public:
    Kernel() = default;
    Kernel(int horizon, int states, int actions)
        : horizon_(horizon), states_(states), actions_(actions),
          data_(static_cast<std::size_t>(horizon) * states * actions * states, 0.0) {
        if (horizon < 0 || states < 0 || actions < 0) throw ValidationError("Kernel: negative dimension");
    }

    int horizon() const { return horizon_; }
    int states() const { return states_; }
    int actions() const { return actions_; }

    prec_t& operator()(int h, int s, int a, int next) { return data_[index(h, s, a) + next]; }
    prec_t operator()(int h, int s, int a, int next) const { return data_[index(h, s, a) + next]; }

    std::span<prec_t> row(int h, int s, int a) { return {data_.data() + index(h, s, a), static_cast<std::size_t>(states_)}; }
    std::span<const prec_t> row(int h, int s, int a) const {
        return {data_.data() + index(h, s, a), static_cast<std::size_t>(states_)};
    }

    std::vector<prec_t>& data() { return data_; }
    const std::vector<prec_t>& data() const { return data_; }
    bool operator==(const Kernel&) const = default;

private:
    std::size_t index(int h, int s, int a) const {
        return ((static_cast<std::size_t>(h) * states_ + s) * actions_ + a) * states_;
    }

    int horizon_ = 0;
    int states_ = 0;
    int actions_ = 0;
    std::vector<prec_t> data_;
};

} // namespace irl
