import logging

import numpy as np
import pytest
from scipy import sparse

from polarfield.core.exceptions import SolveFailureError
from polarfield.core.solve.kkt import solve_kkt
from polarfield.log_utils import collect_warnings


def test_collect_warnings_below_package_logger():
    logger = logging.getLogger("polarfield.core.test")
    with collect_warnings() as collector:
        logger.warning("first %d", 1)
        logger.info("ignored")
        logging.getLogger("other").warning("outside")
    logger.warning("after")
    assert collector.messages == ["polarfield.core.test: first 1"]


def test_failed_regularization_is_retried_and_logged():
    hessian = sparse.csr_matrix((2, 2))
    constraints = sparse.csr_matrix([[1.0, 1.0], [1.0, 1.0]])
    with collect_warnings() as collector, pytest.raises(SolveFailureError):
        solve_kkt(hessian, constraints, np.zeros(2), np.array([1.0, 2.0]))
    assert len(collector.messages) >= 2
    assert all("attempts" in message for message in collector.messages)
