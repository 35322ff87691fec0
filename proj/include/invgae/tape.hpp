#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "invgae/sparse.hpp"
#include "invgae/tensor.hpp"

namespace invgae {

struct NodeId {
    int index = -1;
    bool valid() const { return index >= 0; }
};

using GradientMap = std::map<std::string, Tensor>;

// Record of forward primitives enabling exact reverse-mode differentiation.
// A tape is confined to one thread; typical use is one tape per training
// step, re-recorded each epoch. Referenced CsrMatrix operators must outlive
// the tape.
class Tape {
public:
    enum class Op {
        Constant,
        Param,
        MatMul,
        SpMM,
        Add,
        Sub,
        Mul,
        Scale,
        Relu,
        Clamp,
        Exp,
        Log,
        Sum,
        RowSum,
        AddRowVec,
        SqFrob,
    };

    NodeId constant(Tensor value);
    NodeId scalar_constant(double value);
    // Registers a named trainable leaf (value snapshot taken now).
    NodeId param(std::string_view name, const Tensor& value);

    NodeId matmul(NodeId a, NodeId b);
    NodeId spmm(const CsrMatrix& m, NodeId x);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId elementwise_mul(NodeId a, NodeId b);
    NodeId scale(NodeId a, double s);
    NodeId relu(NodeId a);
    NodeId clamp(NodeId a, double lo, double hi);
    NodeId exp(NodeId a);
    NodeId log(NodeId a);  // throws NumericError on non-positive entries
    NodeId sum(NodeId a);      // 1x1
    NodeId row_sum(NodeId a);  // Nx1
    NodeId add_rowvec(NodeId a, NodeId v);  // v: 1 x cols, broadcast over rows
    NodeId squared_frobenius(NodeId a, NodeId b);  // 1x1, sum((a-b)^2)

    const Tensor& value(NodeId id) const;
    double scalar_value(NodeId id) const;  // requires 1x1
    std::size_t size() const { return nodes_.size(); }

    // Exact reverse-mode gradients of a scalar output with respect to every
    // registered parameter. Parameters that did not reach the output get a
    // zero gradient. The tape itself is left untouched (re-runnable).
    GradientMap backward(NodeId output) const;

private:
    struct Node {
        Op op;
        int a = -1;
        int b = -1;
        double s0 = 0.0;
        double s1 = 0.0;
        const CsrMatrix* sp = nullptr;
        std::string name;  // Param only
        Tensor value;
    };

    NodeId push(Node n);
    const Node& node(NodeId id) const;

    std::vector<Node> nodes_;
};

}  // namespace invgae
