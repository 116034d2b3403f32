"""Desk-scale p-adic cohomology of Dwork-twisted (sigma, nabla)-modules on the affine line."""
