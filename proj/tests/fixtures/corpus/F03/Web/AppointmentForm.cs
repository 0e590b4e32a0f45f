using System;

namespace Clinic.Web;

public sealed class AppointmentForm
{
    public string PatientName { get; set; } = "";
    public string Date { get; set; } = "";
    public int DurationMinutes { get; set; }

    public DateTime ParsedDate() => DateTime.Parse(Date);

    public TimeSpan Duration() => TimeSpan.FromMinutes(DurationMinutes);
}
