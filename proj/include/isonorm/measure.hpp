#pragma once

#include "isonorm/body.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <variant>

namespace isonorm {

/// Probability laws the samplers and functional estimators understand.
class MeasureSpec {
public:
    struct UniformOnBody {
        Body body;
    };
    struct StandardGaussian {
        int dim;
    };
    /// Law of t_1 X_1 + ... + t_s X_s with X_j i.i.d. uniform on a volume-1
    /// isotropic body.
    struct WeightedSum {
        Body body;
        Vec t;
    };
    struct Rescaled {
        std::shared_ptr<const MeasureSpec> inner;
        double factor; // > 0, multiplies every sample
    };
    using Variant = std::variant<UniformOnBody, StandardGaussian, WeightedSum, Rescaled>;

    static MeasureSpec uniform_on(Body body)
    {
        return MeasureSpec(Variant{UniformOnBody{std::move(body)}});
    }
    static MeasureSpec gaussian(int dim)
    {
        if (dim < 1) throw std::invalid_argument("gaussian: dim must be >= 1");
        return MeasureSpec(Variant{StandardGaussian{dim}});
    }
    static MeasureSpec weighted_sum(Body body, Vec t)
    {
        if (!body.isotropic_flag())
            throw std::invalid_argument("weighted_sum: body must carry the isotropic flag");
        if (t.size() < 1) throw std::invalid_argument("weighted_sum: need at least one weight");
        return MeasureSpec(Variant{WeightedSum{std::move(body), std::move(t)}});
    }
    static MeasureSpec rescaled(MeasureSpec inner, double factor)
    {
        if (!(factor > 0.0)) throw std::invalid_argument("rescaled: factor must be > 0");
        return MeasureSpec(
            Variant{Rescaled{std::make_shared<const MeasureSpec>(std::move(inner)), factor}});
    }

    const Variant& variant() const { return var_; }

    int dim() const
    {
        struct Visitor {
            int operator()(const UniformOnBody& m) const { return m.body.dim(); }
            int operator()(const StandardGaussian& m) const { return m.dim; }
            int operator()(const WeightedSum& m) const { return m.body.dim(); }
            int operator()(const Rescaled& m) const { return m.inner->dim(); }
        };
        return std::visit(Visitor{}, var_);
    }

    std::string label() const
    {
        struct Visitor {
            std::string operator()(const UniformOnBody& m) const
            {
                return "uniform:" + m.body.label();
            }
            std::string operator()(const StandardGaussian& m) const
            {
                return "gaussian" + std::to_string(m.dim);
            }
            std::string operator()(const WeightedSum& m) const
            {
                return "nu_t[s=" + std::to_string(m.t.size()) + "]:" + m.body.label();
            }
            std::string operator()(const Rescaled& m) const
            {
                return "rescaled:" + m.inner->label();
            }
        };
        return std::visit(Visitor{}, var_);
    }

private:
    explicit MeasureSpec(Variant var) : var_(std::move(var)) {}
    Variant var_;
};

} // namespace isonorm
