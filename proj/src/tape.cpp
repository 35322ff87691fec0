#include "invgae/tape.hpp"

#include <string>

#include "invgae/common.hpp"
#include "invgae/kernels.hpp"

namespace invgae {

namespace {
const kernels::KernelTable& K() { return kernels::active(); }
}  // namespace

NodeId Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return NodeId{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(NodeId id) const {
    if (!id.valid() || id.index >= static_cast<int>(nodes_.size()))
        throw ShapeError("Tape: invalid node id");
    return nodes_[id.index];
}

const Tensor& Tape::value(NodeId id) const { return node(id).value; }

double Tape::scalar_value(NodeId id) const {
    const Tensor& v = value(id);
    if (v.rows() != 1 || v.cols() != 1)
        throw ShapeError("Tape::scalar_value: node is " + v.shape_str() + ", expected (1x1)");
    return v.at(0, 0);
}

NodeId Tape::constant(Tensor value) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

NodeId Tape::scalar_constant(double value) {
    Tensor t(1, 1);
    t.at(0, 0) = value;
    return constant(std::move(t));
}

NodeId Tape::param(std::string_view name, const Tensor& value) {
    Node n;
    n.op = Op::Param;
    n.name = std::string(name);
    n.value = value;
    return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.cols() != bv.rows())
        throw ShapeError("matmul: shape mismatch " + av.shape_str() + " x " + bv.shape_str());
    Node n;
    n.op = Op::MatMul;
    n.a = a.index;
    n.b = b.index;
    n.value = Tensor(av.rows(), bv.cols());
    K().matmul_ab(av.data(), bv.data(), n.value.data(), av.rows(), av.cols(), bv.cols());
    return push(std::move(n));
}

NodeId Tape::spmm(const CsrMatrix& m, NodeId x) {
    const Tensor& xv = value(x);
    if (m.cols() != xv.rows())
        throw ShapeError("sparse_dense_matmul: shape mismatch " + m.shape_str() + " x " +
                         xv.shape_str());
    Node n;
    n.op = Op::SpMM;
    n.a = x.index;
    n.sp = &m;
    n.value = Tensor(m.rows(), xv.cols());
    K().spmm(m.row_ptr().data(), m.col_idx().data(), m.values().data(), m.rows(), xv.data(),
             n.value.data(), xv.cols());
    return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "add");
    Node n;
    n.op = Op::Add;
    n.a = a.index;
    n.b = b.index;
    n.value = Tensor(av.rows(), av.cols());
    K().add(av.data(), bv.data(), n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::sub(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "sub");
    Node n;
    n.op = Op::Sub;
    n.a = a.index;
    n.b = b.index;
    n.value = Tensor(av.rows(), av.cols());
    K().sub(av.data(), bv.data(), n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::elementwise_mul(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "elementwise_mul");
    Node n;
    n.op = Op::Mul;
    n.a = a.index;
    n.b = b.index;
    n.value = Tensor(av.rows(), av.cols());
    K().mul(av.data(), bv.data(), n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::scale(NodeId a, double s) {
    const Tensor& av = value(a);
    Node n;
    n.op = Op::Scale;
    n.a = a.index;
    n.s0 = s;
    n.value = Tensor(av.rows(), av.cols());
    K().scale(av.data(), s, n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::relu(NodeId a) {
    const Tensor& av = value(a);
    Node n;
    n.op = Op::Relu;
    n.a = a.index;
    n.value = Tensor(av.rows(), av.cols());
    K().relu(av.data(), n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::clamp(NodeId a, double lo, double hi) {
    const Tensor& av = value(a);
    Node n;
    n.op = Op::Clamp;
    n.a = a.index;
    n.s0 = lo;
    n.s1 = hi;
    n.value = Tensor(av.rows(), av.cols());
    K().clamp(av.data(), lo, hi, n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::exp(NodeId a) {
    const Tensor& av = value(a);
    Node n;
    n.op = Op::Exp;
    n.a = a.index;
    n.value = Tensor(av.rows(), av.cols());
    K().exp_(av.data(), n.value.data(), av.size());
    if (!n.value.all_finite()) throw NumericError("exp: overflow to non-finite value");
    return push(std::move(n));
}

NodeId Tape::log(NodeId a) {
    const Tensor& av = value(a);
    for (std::size_t i = 0; i < av.size(); ++i)
        if (av.data()[i] <= 0.0) throw NumericError("log: non-positive input entry");
    Node n;
    n.op = Op::Log;
    n.a = a.index;
    n.value = Tensor(av.rows(), av.cols());
    K().log_(av.data(), n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::sum(NodeId a) {
    const Tensor& av = value(a);
    Node n;
    n.op = Op::Sum;
    n.a = a.index;
    n.value = Tensor(1, 1);
    n.value.at(0, 0) = K().sum(av.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::row_sum(NodeId a) {
    const Tensor& av = value(a);
    Node n;
    n.op = Op::RowSum;
    n.a = a.index;
    n.value = Tensor(av.rows(), 1);
    K().row_sum(av.data(), n.value.data(), av.rows(), av.cols());
    return push(std::move(n));
}

NodeId Tape::add_rowvec(NodeId a, NodeId v) {
    const Tensor& av = value(a);
    const Tensor& vv = value(v);
    if (vv.rows() != 1 || vv.cols() != av.cols())
        throw ShapeError("add_rowvec: bias " + vv.shape_str() + " does not broadcast over " +
                         av.shape_str());
    Node n;
    n.op = Op::AddRowVec;
    n.a = a.index;
    n.b = v.index;
    n.value = Tensor(av.rows(), av.cols());
    K().add_rowvec(av.data(), vv.data(), n.value.data(), av.rows(), av.cols());
    return push(std::move(n));
}

NodeId Tape::squared_frobenius(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "squared_frobenius");
    Node n;
    n.op = Op::SqFrob;
    n.a = a.index;
    n.b = b.index;
    n.value = Tensor(1, 1);
    n.value.at(0, 0) = K().sqdiff(av.data(), bv.data(), av.size());
    return push(std::move(n));
}

GradientMap Tape::backward(NodeId output) const {
    const Tensor& out = value(output);
    if (out.rows() != 1 || out.cols() != 1)
        throw ShapeError("backward: output must be scalar (1x1), got " + out.shape_str());

    std::vector<Tensor> grads(nodes_.size());
    std::vector<bool> touched(nodes_.size(), false);
    auto grad_of = [&](int idx) -> Tensor& {
        if (!touched[idx]) {
            grads[idx] = Tensor(nodes_[idx].value.rows(), nodes_[idx].value.cols());
            touched[idx] = true;
        }
        return grads[idx];
    };

    grad_of(output.index).at(0, 0) = 1.0;

    for (int idx = static_cast<int>(nodes_.size()) - 1; idx >= 0; --idx) {
        if (!touched[idx]) continue;
        const Node& n = nodes_[idx];
        const Tensor& g = grads[idx];
        switch (n.op) {
            case Op::Constant:
            case Op::Param:
                break;
            case Op::MatMul: {
                const Tensor& av = nodes_[n.a].value;
                const Tensor& bv = nodes_[n.b].value;
                Tensor da(av.rows(), av.cols());
                K().matmul_abt(g.data(), bv.data(), da.data(), g.rows(), g.cols(), bv.rows());
                K().axpy(1.0, da.data(), grad_of(n.a).data(), da.size());
                Tensor db(bv.rows(), bv.cols());
                K().matmul_atb(av.data(), g.data(), db.data(), av.rows(), av.cols(), g.cols());
                K().axpy(1.0, db.data(), grad_of(n.b).data(), db.size());
                break;
            }
            case Op::SpMM: {
                const CsrMatrix& m = *n.sp;
                Tensor dx(m.cols(), g.cols());
                K().spmm_t(m.row_ptr().data(), m.col_idx().data(), m.values().data(), m.rows(),
                           m.cols(), g.data(), dx.data(), g.cols());
                K().axpy(1.0, dx.data(), grad_of(n.a).data(), dx.size());
                break;
            }
            case Op::Add:
                K().axpy(1.0, g.data(), grad_of(n.a).data(), g.size());
                K().axpy(1.0, g.data(), grad_of(n.b).data(), g.size());
                break;
            case Op::Sub:
                K().axpy(1.0, g.data(), grad_of(n.a).data(), g.size());
                K().axpy(-1.0, g.data(), grad_of(n.b).data(), g.size());
                break;
            case Op::Mul: {
                const Tensor& av = nodes_[n.a].value;
                const Tensor& bv = nodes_[n.b].value;
                Tensor tmp(g.rows(), g.cols());
                K().mul(g.data(), bv.data(), tmp.data(), g.size());
                K().axpy(1.0, tmp.data(), grad_of(n.a).data(), g.size());
                K().mul(g.data(), av.data(), tmp.data(), g.size());
                K().axpy(1.0, tmp.data(), grad_of(n.b).data(), g.size());
                break;
            }
            case Op::Scale:
                K().axpy(n.s0, g.data(), grad_of(n.a).data(), g.size());
                break;
            case Op::Relu:
                K().relu_grad_acc(nodes_[n.a].value.data(), g.data(), grad_of(n.a).data(),
                                  g.size());
                break;
            case Op::Clamp:
                K().clamp_grad_acc(nodes_[n.a].value.data(), n.s0, n.s1, g.data(),
                                   grad_of(n.a).data(), g.size());
                break;
            case Op::Exp: {
                Tensor tmp(g.rows(), g.cols());
                K().mul(g.data(), n.value.data(), tmp.data(), g.size());
                K().axpy(1.0, tmp.data(), grad_of(n.a).data(), g.size());
                break;
            }
            case Op::Log: {
                const Tensor& av = nodes_[n.a].value;
                Tensor& da = grad_of(n.a);
                for (std::size_t i = 0; i < g.size(); ++i)
                    da.data()[i] += g.data()[i] / av.data()[i];
                break;
            }
            case Op::Sum:
                K().acc_scalar(g.at(0, 0), grad_of(n.a).data(), nodes_[n.a].value.size());
                break;
            case Op::RowSum: {
                Tensor& da = grad_of(n.a);
                const int cols = nodes_[n.a].value.cols();
                for (int r = 0; r < nodes_[n.a].value.rows(); ++r)
                    K().acc_scalar(g.at(r, 0), da.row(r).data(), cols);
                break;
            }
            case Op::AddRowVec: {
                K().axpy(1.0, g.data(), grad_of(n.a).data(), g.size());
                Tensor colsum(1, g.cols());
                K().col_sum(g.data(), colsum.data(), g.rows(), g.cols());
                K().axpy(1.0, colsum.data(), grad_of(n.b).data(), colsum.size());
                break;
            }
            case Op::SqFrob: {
                const Tensor& av = nodes_[n.a].value;
                const Tensor& bv = nodes_[n.b].value;
                Tensor diff(av.rows(), av.cols());
                K().sub(av.data(), bv.data(), diff.data(), av.size());
                const double s = 2.0 * g.at(0, 0);
                K().axpy(s, diff.data(), grad_of(n.a).data(), diff.size());
                K().axpy(-s, diff.data(), grad_of(n.b).data(), diff.size());
                break;
            }
        }
    }

    GradientMap out_grads;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].op != Op::Param) continue;
        const Tensor& pv = nodes_[i].value;
        auto [it, inserted] = out_grads.try_emplace(nodes_[i].name,
                                                    touched[i] ? grads[i]
                                                               : Tensor(pv.rows(), pv.cols()));
        if (!inserted) {
            // same parameter bound more than once: contributions add
            if (touched[i])
                K().axpy(1.0, grads[i].data(), it->second.data(), it->second.size());
        }
    }
    return out_grads;
}

}  // namespace invgae
