"""
Expands threading.
"""

import threading


class ReturnThread(threading.Thread):
    """
    Extends the Thread functionality:
    - Return value of called function is returned by join()
    - An exception occurred within the called function is raised by join()
    """

    # pylint: disable=dangerous-default-value
    def __init__(self, *, group=None, target=None, name=None, args=(),
                 kwargs={}):
        threading.Thread.__init__(self, group, target, name, args, kwargs)
        self._return = None
        self._exc = None

    def run(self):
        if self._target is not None:
            try:
                self._return = self._target(*self._args, **self._kwargs)
            except Exception as exc:  # pylint: disable=broad-except
                self._exc = exc

    def join(self, *args):
        threading.Thread.join(self, *args)
        if self._exc:
            raise self._exc
        return self._return


def split(items, parts):
    """
    Splits items into at most parts contiguous chunks (order preserving).
    @param items: sequence to split
    @param parts: number of chunks wanted
    @return: list of non-empty chunks
    """
    parts = max(1, min(parts, len(items)))
    size, rest = divmod(len(items), parts)
    chunks = []
    start = 0
    for number in range(parts):
        end = start + size + (1 if number < rest else 0)
        chunks.append(items[start:end])
        start = end
    return [chunk for chunk in chunks if len(chunk)]


def map_parallel(function, items, threads=1):
    """
    Applies function to contiguous chunks of items on ReturnThreads and concatenates the results in chunk order,
    so the result does not depend on the number of threads.
    @param function: callable taking a chunk (sequence) and returning a list
    @param items: sequence of work items
    @param threads: number of worker threads
    @return: concatenated list of results
    """
    chunks = split(items, threads)
    if len(chunks) <= 1:
        return list(function(items)) if len(items) else []
    workers = [ReturnThread(target=function, args=[chunk]) for chunk in chunks]
    for worker in workers:
        worker.start()
    result = []
    for worker in workers:
        result.extend(worker.join())
    return result
