from django.utils.deprecation import MiddlewareMixin
import logging

logger = logging.getLogger(__name__)


class BadRequestLoggingMiddleware(MiddlewareMixin):
    """
    Logs every API request and warns on rejected input (400 / 422 responses)
    """

    def process_request(self, request):
        logger.info(f"Request: {request.method} {request.get_full_path()}")
        return None

    def process_response(self, request, response):
        if response.status_code in (400, 422):
            logger.warning(
                f"{response.status_code} response: {request.method} {request.get_full_path()} "
                f"Content-Type: {request.META.get('CONTENT_TYPE', 'None')} "
                f"Body: {response.content[:200]!r}"
            )
        return response
