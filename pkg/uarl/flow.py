"""
Service flows.

A flow is a generator that yields service requests, or nested flows, and receives
their results. The same flow can then be driven by a blocking session, where a
request resolves to its response immediately, or by an asyncio session, where a
request resolves to an awaitable.
"""

import functools
import inspect


class FlowExecutor:
    """
    Base class for flow executors.
    """

    @staticmethod
    def _advance(flow, outcome, failed):
        """
        Resumes the flow with the outcome of the previous yield, returning a
        (finished, object) tuple where object is the next yielded object or the
        return value of the flow.
        """
        try:
            if failed:
                yielded = flow.throw(outcome)
            else:
                yielded = flow.send(outcome)
        except StopIteration as exc:
            return True, exc.value
        return False, yielded


class SyncExecutor(FlowExecutor):
    """
    Executes flows whose requests resolve immediately.
    """

    def execute_flow(self, flow):
        outcome, failed = None, False
        try:
            while True:
                finished, yielded = self._advance(flow, outcome, failed)
                if finished:
                    return yielded
                try:
                    if inspect.isgenerator(yielded):
                        outcome = self.execute_flow(yielded)
                    else:
                        outcome = yielded
                except Exception as exc:
                    outcome, failed = exc, True
                else:
                    failed = False
        finally:
            flow.close()


class AsyncExecutor(FlowExecutor):
    """
    Executes flows whose requests resolve to awaitables.
    """

    async def execute_flow(self, flow):
        outcome, failed = None, False
        try:
            while True:
                finished, yielded = self._advance(flow, outcome, failed)
                if finished:
                    return yielded
                try:
                    if inspect.isgenerator(yielded):
                        outcome = await self.execute_flow(yielded)
                    elif inspect.isawaitable(yielded):
                        outcome = await yielded
                    else:
                        outcome = yielded
                except Exception as exc:
                    outcome, failed = exc, True
                else:
                    failed = False
        finally:
            flow.close()


class Flowable:
    """
    Base class for objects whose methods are flows.
    """

    __flow_executor__: FlowExecutor | None = None

    @property
    def is_async(self):
        return isinstance(self.__flow_executor__, AsyncExecutor)

    def get_flow_executor(self):
        return self.__flow_executor__


def flow(method):
    """
    Decorator marking a generator method of a flowable as a flow, executed by the
    flowable's executor when called.
    """

    @functools.wraps(method)
    def wrapper(flowable, *args, **kwargs):
        gen = method(flowable, *args, **kwargs)
        if inspect.isgenerator(gen):
            return flowable.get_flow_executor().execute_flow(gen)
        return gen

    return wrapper
