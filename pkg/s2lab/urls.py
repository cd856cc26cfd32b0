from django.urls import path
from . import views

app_name = 's2lab'
urlpatterns = [
    path('api/analyze/', views.analyze, name='analyze'),
    path('api/run/', views.run_view, name='run'),
    path('api/bench-records/', views.bench_records, name='bench_records'),
]
