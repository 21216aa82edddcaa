#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <limits>

namespace blade {

using P2D = Eigen::Vector2d;
using P3D = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kNoDepth = 0.0;

inline bool nearly_equal(double a, double b, double rel = 1e-12, double abs = 1e-15)
{
	const double diff = std::abs(a - b);
	return diff <= abs or diff <= rel * std::max(std::abs(a), std::abs(b));
}

/// Rigid transform (rotation + translation), maps points from `src` frame to `dst` frame.
struct Rigid
{
	Mat3 rotation = Mat3::Identity();
	P3D translation = P3D::Zero();

	P3D operator()(const P3D& p) const { return rotation * p + translation; }

	Rigid inverse() const
	{
		Rigid inv;
		inv.rotation = rotation.transpose();
		inv.translation = -(inv.rotation * translation);
		return inv;
	}

	Rigid operator*(const Rigid& o) const
	{
		Rigid r;
		r.rotation = rotation * o.rotation;
		r.translation = rotation * o.translation + translation;
		return r;
	}

	static Rigid identity() { return {}; }

	/// Intrinsic x-y-z Euler angles (rad), applied as Rz * Ry * Rx.
	static Rigid from_euler(double rx, double ry, double rz, const P3D& t = P3D::Zero())
	{
		Rigid r;
		r.rotation =
			(Eigen::AngleAxisd(rz, P3D::UnitZ()) *
			 Eigen::AngleAxisd(ry, P3D::UnitY()) *
			 Eigen::AngleAxisd(rx, P3D::UnitX())).toRotationMatrix();
		r.translation = t;
		return r;
	}

	static Rigid from_axis_angle(const P3D& aa, const P3D& t)
	{
		Rigid r;
		const double angle = aa.norm();
		if (angle < 1e-300) r.rotation = Mat3::Identity();
		else r.rotation = Eigen::AngleAxisd(angle, aa / angle).toRotationMatrix();
		r.translation = t;
		return r;
	}

	P3D axis_angle() const
	{
		Eigen::AngleAxisd aa(rotation);
		return aa.angle() * aa.axis();
	}
};

} // namespace blade
