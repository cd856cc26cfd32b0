"""
URL configuration for the s2site project.
"""

from django.contrib import admin
from django.urls import path, include
from s2lab.views import health_check

urlpatterns = [
    path('', include('s2lab.urls')),
    path('admin/', admin.site.urls),
    path('health/', health_check, name='health_check'),
]
