#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ezdit/common.hpp"
#include "ezdit/rng.hpp"

namespace ezdit {

using Shape = std::vector<int64_t>;

inline int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int64_t d : s) {
        n *= d;
    }
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) {
            out += ", ";
        }
        out += std::to_string(s[i]);
    }
    return out + "]";
}

class Graph;

struct TensorImpl {
    Shape shape;
    std::vector<double> data;

    // Leaf gradient accumulator, allocated on first accumulation.
    std::vector<double> grad;
    bool requires_grad = false;

    // True when a recording graph must propagate through this tensor.
    bool needs_grad = false;
    // Index of the producing node in its graph, -1 for leaves/constants.
    int64_t node = -1;
    Graph* graph = nullptr;

    // Per-backward-pass scratch gradients for intermediates.
    std::vector<double> gscratch;
    uint64_t gstamp = 0;
};

// Dense row-major tensor of doubles with value semantics over a shared
// buffer. Copying a Tensor aliases the storage; clone() deep-copies.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape) {
        Tensor t;
        t.impl_ = std::make_shared<TensorImpl>();
        t.impl_->data.assign(static_cast<size_t>(shape_numel(shape)), 0.0);
        t.impl_->shape = std::move(shape);
        return t;
    }

    static Tensor full(Shape shape, double value) {
        Tensor t = zeros(std::move(shape));
        for (auto& v : t.impl_->data) {
            v = value;
        }
        return t;
    }

    static Tensor from_data(Shape shape, std::vector<double> values) {
        require(shape_numel(shape) == static_cast<int64_t>(values.size()),
                "Tensor::from_data: shape ", shape_str(shape), " does not match ",
                values.size(), " values");
        Tensor t;
        t.impl_ = std::make_shared<TensorImpl>();
        t.impl_->shape = std::move(shape);
        t.impl_->data = std::move(values);
        return t;
    }

    static Tensor scalar(double value) { return from_data({1}, {value}); }

    static Tensor randn(Shape shape, Rng& rng, double stddev = 1.0) {
        Tensor t = zeros(std::move(shape));
        for (auto& v : t.impl_->data) {
            v = stddev * rng.normal();
        }
        return t;
    }

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    int rank() const { return static_cast<int>(impl_->shape.size()); }
    int64_t dim(int i) const { return impl_->shape[static_cast<size_t>(i)]; }
    int64_t numel() const { return impl_ ? static_cast<int64_t>(impl_->data.size()) : 0; }

    double* data() { return impl_->data.data(); }
    const double* data() const { return impl_->data.data(); }
    std::vector<double>& values() { return impl_->data; }
    const std::vector<double>& values() const { return impl_->data; }

    double item() const {
        require(numel() == 1, "Tensor::item: tensor has ", numel(), " elements");
        return impl_->data[0];
    }

    double operator[](int64_t i) const { return impl_->data[static_cast<size_t>(i)]; }

    Tensor& set_requires_grad(bool value = true) {
        require(impl_ != nullptr, "set_requires_grad on undefined tensor");
        require(impl_->node < 0, "requires_grad can only be set on leaf tensors");
        impl_->requires_grad = value;
        impl_->needs_grad = value;
        return *this;
    }

    bool requires_grad() const { return impl_ && impl_->requires_grad; }

    // Accumulated leaf gradient; zeros if backward has not touched this leaf.
    std::vector<double> grad() const {
        if (!impl_ || impl_->grad.empty()) {
            return std::vector<double>(static_cast<size_t>(numel()), 0.0);
        }
        return impl_->grad;
    }

    bool has_grad() const { return impl_ && !impl_->grad.empty(); }

    void zero_grad() {
        if (impl_) {
            impl_->grad.assign(impl_->data.size(), 0.0);
        }
    }

    // Deep copy, detached from any graph.
    Tensor clone() const {
        Tensor t = from_data(impl_->shape, impl_->data);
        return t;
    }

    const std::shared_ptr<TensorImpl>& impl() const { return impl_; }

private:
    std::shared_ptr<TensorImpl> impl_;
};

// Reverse-mode tape. Nodes are recorded in execution order, which is a
// valid topological order; backward consumes them in reverse.
class Graph {
public:
    struct Node {
        std::shared_ptr<TensorImpl> out;
        std::vector<std::shared_ptr<TensorImpl>> ins;
        // Called with the upstream gradient of `out`; accumulates into the
        // inputs via Graph::accumulate.
        std::function<void(Node&, const std::vector<double>&)> backward;
        const char* op = "";
    };

    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;
    ~Graph() {
        if (current_ == this) {
            current_ = nullptr;
        }
    }

    static Graph* current() { return current_; }

    size_t size() const { return nodes_.size(); }

    void record(const char* op, const Tensor& out, std::vector<Tensor> ins,
                std::function<void(Node&, const std::vector<double>&)> backward) {
        Node node;
        node.op = op;
        node.out = out.impl();
        node.ins.reserve(ins.size());
        for (auto& t : ins) {
            node.ins.push_back(t.impl());
        }
        node.backward = std::move(backward);
        out.impl()->needs_grad = true;
        out.impl()->node = static_cast<int64_t>(nodes_.size());
        out.impl()->graph = this;
        nodes_.push_back(std::move(node));
    }

    // Propagates d(loss)/d(leaf) into every requires_grad leaf, accumulating
    // on top of any gradient already present. Running backward twice without
    // zeroing doubles the leaf gradients exactly.
    void backward(const Tensor& loss) {
        require(!nodes_.empty(), "backward: graph is empty");
        require(loss.numel() == 1, "backward: loss must be scalar, got shape ",
                shape_str(loss.shape()));
        auto li = loss.impl();
        require(li->graph == this && li->node >= 0,
                "backward: loss was not produced by this graph");

        ++stamp_;
        touch(*li);
        li->gscratch[0] = 1.0;

        for (size_t i = nodes_.size(); i-- > 0;) {
            Node& n = nodes_[i];
            TensorImpl& out = *n.out;
            if (out.gstamp != stamp_) {
                continue; // no gradient reached this node
            }
            n.backward(n, out.gscratch);
        }
    }

    // Adds `g` (length = t.numel) into the gradient of `t`: straight into
    // the leaf accumulator for leaves, into stamped scratch for intermediates.
    void accumulate(TensorImpl& t, const double* g) {
        if (!t.needs_grad) {
            return;
        }
        if (t.node < 0) {
            if (!t.requires_grad) {
                return;
            }
            if (t.grad.empty()) {
                t.grad.assign(t.data.size(), 0.0);
            }
            for (size_t i = 0; i < t.data.size(); ++i) {
                t.grad[i] += g[i];
            }
            return;
        }
        touch(t);
        for (size_t i = 0; i < t.data.size(); ++i) {
            t.gscratch[i] += g[i];
        }
    }

private:
    void touch(TensorImpl& t) {
        if (t.gstamp != stamp_) {
            t.gscratch.assign(t.data.size(), 0.0);
            t.gstamp = stamp_;
        }
    }

    friend class GraphScope;
    static inline thread_local Graph* current_ = nullptr;

    std::vector<Node> nodes_;
    uint64_t stamp_ = 0;
};

// Activates a graph for the current thread; ops record while one is active.
// No active graph means pure inference: nothing is recorded.
class GraphScope {
public:
    explicit GraphScope(Graph& g) : prev_(Graph::current_) { Graph::current_ = &g; }
    ~GraphScope() { Graph::current_ = prev_; }
    GraphScope(const GraphScope&) = delete;
    GraphScope& operator=(const GraphScope&) = delete;

private:
    Graph* prev_;
};

inline void backward(Graph& g, const Tensor& loss) { g.backward(loss); }

} // namespace ezdit
